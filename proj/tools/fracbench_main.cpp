#include "fracbench/cli.hpp"

int main(int argc, char** argv) { return fracbench::run_cli(argc, argv); }

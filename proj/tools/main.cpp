#include "shrinkbench/cli.hpp"

int main(int argc, char** argv) { return shrinkbench::run_cli(argc, argv); }

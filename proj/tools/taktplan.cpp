#include "takt/cli.hpp"

int main(int argc, char** argv) { return takt::run_cli(argc, argv); }

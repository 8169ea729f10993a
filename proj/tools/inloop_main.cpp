#include "inloop/cli.hpp"

int main(int argc, char** argv) { return inloop::run_cli(argc, argv); }

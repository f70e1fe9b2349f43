#include "evoattack/cli.hpp"

int main(int argc, char** argv) { return evoattack::run_cli(argc, argv); }

#include "lowlight/cli.hpp"

int main(int argc, char** argv) { return lowlight::run_cli(argc, argv); }

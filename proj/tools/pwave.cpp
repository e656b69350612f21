#include "pwave/cli.hpp"

int main(int argc, char** argv) { return pwave::cli_main(argc, argv); }

#include "cli.hpp"

int main(int argc, char** argv) { return reveal::cli::cli_main(argc, argv); }

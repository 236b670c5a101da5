#include "gpcs/cli.hpp"

int main(int argc, char** argv) { return gpcs::cli_main(argc, argv); }

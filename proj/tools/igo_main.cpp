#include "igo/cli.hpp"

int main(int argc, char** argv) { return igo::cli_main(argc, argv); }

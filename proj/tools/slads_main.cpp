#include "slads/cli.hpp"

int main(int argc, char** argv) { return slads::cli::main(argc, argv); }

#include "treedisp/cli.hpp"

int main(int argc, char** argv) { return treedisp::cli::main(argc, argv); }

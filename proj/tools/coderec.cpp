#include "coderec/cli.hpp"

int main(int argc, char** argv) { return coderec::cli::run(argc, argv); }

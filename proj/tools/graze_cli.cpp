#include "graze/cli.hpp"

int main(int argc, char** argv) { return graze::cli::main(argc, argv); }

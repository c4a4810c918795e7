#include <nevan/cli.hpp>

int main(int argc, char** argv) { return nevan::cli::main(argc, argv); }

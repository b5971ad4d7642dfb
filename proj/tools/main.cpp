#include "crude/cli.hpp"

int main(int argc, char** argv) { return crude::cli::run(argc, argv); }

#include "sarsweep/cli.hpp"

int main(int argc, char** argv) { return sarsweep::cli::run(argc, argv); }

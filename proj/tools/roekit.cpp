#include "roekit/cli.hpp"

int main(int argc, char** argv) { return roekit::cli::run(argc, argv); }

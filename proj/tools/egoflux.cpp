#include "egoflux/cli.hpp"

int main(int argc, char** argv) { return egoflux::cli::run(argc, argv); }

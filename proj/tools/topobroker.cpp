#include "topo/cli.hpp"

int main(int argc, char** argv) { return topo::cli::run(argc, argv); }

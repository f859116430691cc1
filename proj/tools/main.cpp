#include "cli.hpp"

int main(int argc, char** argv) { return tfw::cli::run(argc, argv); }

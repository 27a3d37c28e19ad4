#include "meanlab/cli.hpp"

int main(int argc, char** argv) { return meanlab::cli::run(argc, argv); }

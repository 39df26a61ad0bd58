#include "seqfam/cli.hpp"

int main(int argc, char** argv) { return seqfam::cli::run(argc, argv); }

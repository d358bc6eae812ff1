#include "delfi/cli.hpp"

int main(int argc, char** argv) { return delfi::cli::run(argc, argv); }

#include "wkl/cli.hpp"

int main(int argc, char** argv) { return wkl::cli::run(argc, argv); }

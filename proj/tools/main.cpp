#include "fmw/cli.hpp"

int main(int argc, char** argv) { return fmw::cli::run(argc, argv); }

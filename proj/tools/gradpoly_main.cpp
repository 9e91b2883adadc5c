#include "gradpoly/cli.hpp"

int main(int argc, char** argv) { return gradpoly::cli::run(argc, argv); }

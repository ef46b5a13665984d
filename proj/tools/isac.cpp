#include "isac/cli.hpp"

int main(int argc, char** argv) { return isac::cli::run(argc, argv); }

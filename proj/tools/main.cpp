#include "lps_cli.hpp"

int main(int argc, char** argv) { return lps::cli::run(argc, argv); }

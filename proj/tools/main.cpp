#include "converter/cli.hpp"

int main(int argc, char** argv) { return converter::cli::run(argc, argv); }

#include "multinorm/cli.hpp"

int main(int argc, char** argv) { return multinorm::cli::run(argc, argv); }

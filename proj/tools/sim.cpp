#include "rydeit/cli/commands.hpp"

int main(int argc, char** argv) { return rydeit::cli::run(argc, argv); }

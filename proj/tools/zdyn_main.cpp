#include "zdyn/cli/commands.hpp"

int main(int argc, char** argv) { return zdyn::cli::run(argc, argv); }

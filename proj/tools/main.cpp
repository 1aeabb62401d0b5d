#include "harmonium/cli/commands.hpp"

int main(int argc, char** argv) { return harmonium::cli::run(argc, argv); }

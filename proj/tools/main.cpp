#include "commands.hpp"

int main(int argc, char** argv) { return prbfn::cli::run_cli(argc, argv); }

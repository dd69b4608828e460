#include "qflqg/cli/commands.hpp"

int main(int argc, char** argv) { return qflqg::cli::run_cli(argc, argv); }

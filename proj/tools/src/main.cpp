#include "rkhslab_cli/runner.hpp"

int main(int argc, char** argv) { return rkhslab::cli::run_main(argc, argv); }

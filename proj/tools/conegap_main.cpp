#include "conegap/cli_run.hpp"

int main(int argc, char** argv) { return conegap::run_cli(argc, argv); }

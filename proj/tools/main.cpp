#include "hodgeflow/cli.hpp"

int main(int argc, char** argv) { return hodgeflow::run_cli(argc, argv); }

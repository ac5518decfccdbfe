#include "ccucp/cli.hpp"

int main(int argc, char** argv) { return ccucp::run_cli(argc, argv); }

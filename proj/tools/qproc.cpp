#include "qproc/cli.hpp"

int main(int argc, char** argv) { return qproc::run_cli(argc, argv); }

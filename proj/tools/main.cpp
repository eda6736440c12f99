#include "flowname/cli.hpp"

int main(int argc, char** argv) { return flowname::runCli(argc, argv); }

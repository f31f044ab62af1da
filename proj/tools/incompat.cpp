#include "incompat/cli.hpp"

int main(int argc, char** argv) { return incompat::run_command(argc, argv); }

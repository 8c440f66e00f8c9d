#include "tfred/cli.hpp"

int main(int argc, char** argv) { return tfred::run_cli(argc, argv); }

#include "syntaxprobe/cli.hpp"

int main(int argc, char** argv) { return syntaxprobe::run_cli(argc, argv); }

#include "bispec/cli.hpp"

int main(int argc, char** argv) { return bispec::run(argc, argv); }

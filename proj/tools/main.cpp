#include "cli.hpp"

int main(int argc, char** argv) { return graypatch::cli::run(argc, argv); }

#include "graduate/commands.hpp"

int main(int argc, char** argv) { return graduate::cli::run(argc, argv); }

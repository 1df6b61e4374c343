#include "cstarreg/cli.hpp"

int main(int argc, char** argv) { return cstarreg::cli::main_entry(argc, argv); }

#include "wavelqr/commands.hpp"

int main(int argc, char** argv) { return wavelqr::cli::main_entry(argc, argv); }

#include "app.hpp"

int main(int argc, char** argv) { return pickands::cli::main_entry(argc, argv); }

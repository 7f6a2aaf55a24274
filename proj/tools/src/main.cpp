#include <iostream>

#include "hegsim_app/commands.hpp"

int main(int argc, char** argv) { return hegsim::app::run_cli(argc, argv, std::cout, std::cerr); }

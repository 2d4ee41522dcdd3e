#include <iostream>

#include "stmforge/app/commands.hpp"

int main(int argc, char** argv) { return stmforge::app::run(argc, argv, std::cout, std::cerr); }

#include "pipeline.hpp"

#include <iostream>

int main(int argc, char** argv) { return dpomdp::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "hetsim/app.hpp"

int main(int argc, char** argv) { return hetsim::run(argc, argv, std::cout, std::cerr); }

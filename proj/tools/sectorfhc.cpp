#include "sectorfhc/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return sectorfhc::cli::run(argc, argv, std::cout, std::cerr);
}

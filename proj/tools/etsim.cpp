#include <iostream>

#include "etsim/cli.hpp"

int main(int argc, char** argv)
{
    return etsim::cli::run(argc, argv, std::cout, std::cerr);
}

#include "spde/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return spde::run_cli(argc, argv, std::cout, std::cerr);
}

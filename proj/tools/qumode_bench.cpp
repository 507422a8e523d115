#include <iostream>

#include "qumode/cli.hpp"

int main(int argc, char** argv)
{
    return qumode::run_cli(argc, argv, std::cout, std::cerr);
}

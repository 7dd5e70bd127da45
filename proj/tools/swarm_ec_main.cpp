#include <iostream>

#include "swarm_ec/cli.hpp"

int main(int argc, char** argv)
{
    return swarm_ec::cli::run(argc, argv, std::cout, std::cerr);
}

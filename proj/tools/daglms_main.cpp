#include <iostream>

#include "daglms/cli.hpp"

int main(int argc, char** argv)
{
    return daglms::cli::run_main(argc, argv, std::cout, std::cerr);
}

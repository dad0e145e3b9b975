#include <iostream>

#include "twoaxis/cli.hpp"

int main(int argc, char ** argv)
{
  return twoaxis::cli::run(argc, argv, std::cout, std::cerr);
}

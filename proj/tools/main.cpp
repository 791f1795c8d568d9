#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "mathlex/service.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mathlex::cli::run(args, std::cout, std::cerr, mathlex::current_environment());
}

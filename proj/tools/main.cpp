#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "qpz/kernels.hpp"

int main(int argc, char** argv) {
  qpz::configure_threads_from_env();
  std::vector<std::string> args(argv + 1, argv + argc);
  return qpz::cli::run(args, std::cout, std::cerr);
}

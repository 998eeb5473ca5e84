#include <iostream>
#include <string>
#include <vector>

#include "ivgnn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ivgnn::cli::dispatch(args, std::cout, std::cerr);
}

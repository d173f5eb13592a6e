#include <cstdlib>
#include <iostream>

#include "qcsp/cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  const char* env = std::getenv("QCSP_BUDGET");
  return qcsp::cli::run(args, std::cout, std::cerr, env ? env : "");
}

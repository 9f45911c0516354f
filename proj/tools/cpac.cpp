#include <iostream>

#include "cpac/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const cpac::cli::DispatchResult result = cpac::cli::dispatch(args);
  if (!result.out.empty()) std::cout << result.out;
  if (!result.err.empty()) std::cerr << result.err;
  return result.exit_code;
}

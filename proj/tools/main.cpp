#include <string>
#include <vector>

#include "rloco/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rloco::cli::run(args);
}

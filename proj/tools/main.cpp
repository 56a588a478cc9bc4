#include <string>
#include <vector>

#include "morreylab/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return morreylab::run_cli(args);
}

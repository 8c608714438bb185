#include <vector>

#include "signbench/harness.hpp"

int main(int argc, char** argv) {
  return signbench::cli_dispatch(std::vector<std::string>(argv + 1, argv + argc));
}

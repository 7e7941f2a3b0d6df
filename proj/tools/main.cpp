#include <string>
#include <vector>

#include "fcnls/cli_io.hpp"

int main(int argc, char** argv) {
  return fcnls::run_main(std::vector<std::string>(argv + 1, argv + argc));
}

#include <string>
#include <vector>

#include "bgpc_cli.hpp"

int main(int argc, char** argv) {
  return bgpc::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}

#include <string>
#include <vector>

#include "evoflow/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(size_t(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return evoflow::run_command(args);
}

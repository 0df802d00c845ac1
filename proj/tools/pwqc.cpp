#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "pwqc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  auto env = [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
  return pwqc::run_cli(args, env, std::cout, std::cerr);
}

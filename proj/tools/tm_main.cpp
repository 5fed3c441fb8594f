#include <unistd.h>

#include <cstdlib>
#include <cstring>
#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  tmcli::Options options;
  const char* color = std::getenv("TM_COLOR");
  options.color = isatty(STDERR_FILENO) != 0 && !(color != nullptr && std::strcmp(color, "0") == 0);
  return tmcli::run(args, std::cin, std::cout, std::cerr, options);
}

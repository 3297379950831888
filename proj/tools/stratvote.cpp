#include <iostream>
#include <string>
#include <vector>

#include "stratvote/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return stratvote::dispatch(args, std::cout, std::cerr);
}

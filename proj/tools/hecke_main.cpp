#include <iostream>

int main() {
  std::cout << "hecke: command-line driver (subcommands pending)\n";
  return 0;
}

// Placeholder entry point; subcommands land with the CLI module.
#include <cstdio>

int main() {
  std::puts("stamforge: CLI under construction");
  return 0;
}

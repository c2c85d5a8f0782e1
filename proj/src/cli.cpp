#include "lowlight/cli.hpp"

#include <cstdio>

namespace lowlight {

int run_cli(int argc, const char* const* argv) {
  (void)argc;
  (void)argv;
  std::fprintf(stderr, "lowlight: not wired up yet\n");
  return 1;
}

}  // namespace lowlight

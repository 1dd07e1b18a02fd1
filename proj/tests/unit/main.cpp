#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>

#include <spdlog/cfg/helpers.h>
#include <spdlog/spdlog.h>

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  if (const char* lv = std::getenv("PFRAC_LOG_LEVEL")) spdlog::cfg::helpers::load_levels(lv);
  doctest::Context ctx(argc, argv);
  return ctx.run();
}

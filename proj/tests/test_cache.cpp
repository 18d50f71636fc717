#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "rgrade/cache.hpp"

using namespace rgrade;

namespace {
// Point the cache at a fresh directory for the lifetime of one test.
struct ScopedCacheDir {
  std::filesystem::path dir;
  explicit ScopedCacheDir(const std::string& tag) {
    dir = std::filesystem::temp_directory_path() / ("rgrade-cache-" + tag);
    std::filesystem::remove_all(dir);
    ::setenv("RESTART_GRADE_CACHE", dir.c_str(), 1);
  }
  ~ScopedCacheDir() {
    ::unsetenv("RESTART_GRADE_CACHE");
    std::error_code ec;
    std::filesystem::remove_all(dir, ec);
  }
};
}  // namespace

TEST_CASE("cache round-trip is bit-identical to recomputation") {
  ScopedCacheDir scope("roundtrip");
  const PotentialTable built = cached_potential_kernel(12);  // builds + stores
  const auto loaded = cache_load(2, TableKind::PotentialKernel, 12, "mccrea-whipple");
  REQUIRE(loaded.has_value());
  REQUIRE(loaded->values.size() == built.values.size());
  for (std::size_t i = 0; i < built.values.size(); ++i) {
    CHECK(loaded->values[i] == built.values[i]);  // exact, not approximate
  }
  CHECK(loaded->accuracy == built.accuracy);

  // A second call must hit the cache and agree bitwise as well.
  const PotentialTable again = cached_potential_kernel(12);
  for (std::size_t i = 0; i < built.values.size(); ++i) {
    CHECK(again.values[i] == built.values[i]);
  }
}

TEST_CASE("checksum mismatch forces recomputation, never silent use") {
  ScopedCacheDir scope("corrupt");
  const PotentialTable built = cached_potential_kernel(8);

  // Corrupt one byte of the CSV payload.
  const auto csv = cache_dir() / (cache_stem(2, TableKind::PotentialKernel, 8,
                                             "mccrea-whipple") + ".csv");
  {
    std::fstream f(csv, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(40);
    f.put('7');
  }
  CHECK_FALSE(cache_load(2, TableKind::PotentialKernel, 8, "mccrea-whipple").has_value());

  // The cached entry point transparently rebuilds and re-stores.
  const PotentialTable rebuilt = cached_potential_kernel(8);
  for (std::size_t i = 0; i < built.values.size(); ++i) {
    CHECK(rebuilt.values[i] == built.values[i]);
  }
  CHECK(cache_load(2, TableKind::PotentialKernel, 8, "mccrea-whipple").has_value());
}

TEST_CASE("green tables cache too") {
  ScopedCacheDir scope("green");
  const PotentialTable built = cached_green_table(4, 3);
  const auto loaded = cache_load(3, TableKind::Green, 4, "poisson-dirichlet-3L");
  REQUIRE(loaded.has_value());
  for (std::size_t i = 0; i < built.values.size(); ++i) {
    CHECK(loaded->values[i] == built.values[i]);
  }
}

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "rgrade/harmonic.hpp"

namespace rgrade {

// Potential tables are cached as one CSV per table (header x1,...,xd,value,
// doubles printed with 17 significant digits so reloads are bit-exact) plus
// a JSON sidecar {d, kind, L, method, accuracy, checksum}.

std::filesystem::path cache_dir();  // RESTART_GRADE_CACHE, default ./cache

// Stem of the pair of cache files for a table identity.
std::string cache_stem(int d, TableKind kind, int L, const std::string& method);

// Load a table if present and intact; a checksum mismatch or parse failure
// reads as a miss so the caller recomputes.
std::optional<PotentialTable> cache_load(int d, TableKind kind, int L,
                                         const std::string& method);

void cache_store(const PotentialTable& table);

// Load-or-build with an exclusive file lock on the cache directory while
// building, so concurrent processes do not race on the same table.
PotentialTable cached_potential_kernel(int L);
PotentialTable cached_green_table(int L, int d);

}  // namespace rgrade

#include "rgrade/cache.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace rgrade {

namespace {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Exclusive advisory lock on <dir>/.lock for the lifetime of the object.
class DirLock {
 public:
  explicit DirLock(const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    fd_ = ::open((dir / ".lock").c_str(), O_CREAT | O_RDWR, 0644);
    if (fd_ >= 0) ::flock(fd_, LOCK_EX);
  }
  ~DirLock() {
    if (fd_ >= 0) {
      ::flock(fd_, LOCK_UN);
      ::close(fd_);
    }
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  int fd_ = -1;
};

std::string table_csv(const PotentialTable& t) {
  std::string out;
  out.reserve(t.values.size() * 24);
  for (int i = 0; i < t.d; ++i) {
    out += "x" + std::to_string(i + 1) + ",";
  }
  out += "value\n";
  const BoxIndexer idx = t.indexer();
  char buf[40];
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    const Point p = idx.unflatten(i);
    for (int a = 0; a < t.d; ++a) {
      out += std::to_string(p[a]);
      out += ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", t.values[i]);
    out += buf;
    out += '\n';
  }
  return out;
}

}  // namespace

std::filesystem::path cache_dir() {
  if (const char* env = std::getenv("RESTART_GRADE_CACHE"); env && *env) {
    return env;
  }
  return "./cache";
}

std::string cache_stem(int d, TableKind kind, int L, const std::string& method) {
  return table_kind_name(kind) + "-d" + std::to_string(d) + "-L" +
         std::to_string(L) + "-" + method;
}

std::optional<PotentialTable> cache_load(int d, TableKind kind, int L,
                                         const std::string& method) {
  const auto dir = cache_dir();
  const auto stem = cache_stem(d, kind, L, method);
  const auto csv_path = dir / (stem + ".csv");
  const auto meta_path = dir / (stem + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(csv_path, ec) ||
      !std::filesystem::exists(meta_path, ec)) {
    return std::nullopt;
  }

  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(meta_path));
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
  const std::string csv = read_file(csv_path);
  if (!meta.contains("checksum") ||
      meta["checksum"].get<std::string>() != hex64(fnv1a64(csv))) {
    std::fprintf(stderr, "rgrade: cache checksum mismatch for %s, recomputing\n",
                 stem.c_str());
    return std::nullopt;
  }
  if (meta.value("d", -1) != d || meta.value("L", -1) != L ||
      meta.value("kind", "") != table_kind_name(kind) ||
      meta.value("method", "") != method) {
    return std::nullopt;
  }

  PotentialTable t;
  t.d = d;
  t.kind = kind;
  t.L = L;
  t.method = method;
  t.accuracy = meta.value("accuracy", 0.0);
  const BoxIndexer idx = t.indexer();
  t.values.assign(idx.size(), 0.0);
  std::vector<bool> seen(idx.size(), false);

  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;  // header
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Point p = Point::zero(d);
    const char* s = line.c_str();
    char* end = nullptr;
    for (int a = 0; a < d; ++a) {
      p[a] = std::strtoll(s, &end, 10);
      if (end == s || *end != ',') return std::nullopt;
      s = end + 1;
    }
    const double v = std::strtod(s, &end);
    if (end == s) return std::nullopt;
    if (!idx.contains(p)) return std::nullopt;
    const std::size_t i = idx.flatten(p);
    t.values[i] = v;
    seen[i] = true;
    ++rows;
  }
  if (rows != idx.size()) return std::nullopt;
  for (bool b : seen) {
    if (!b) return std::nullopt;
  }
  return t;
}

void cache_store(const PotentialTable& table) {
  const auto dir = cache_dir();
  std::filesystem::create_directories(dir);
  const auto stem = cache_stem(table.d, table.kind, table.L, table.method);
  const std::string csv = table_csv(table);

  nlohmann::json meta;
  meta["d"] = table.d;
  meta["kind"] = table_kind_name(table.kind);
  meta["L"] = table.L;
  meta["method"] = table.method;
  meta["accuracy"] = table.accuracy;
  meta["checksum"] = hex64(fnv1a64(csv));

  // Write-then-rename keeps readers from ever seeing a torn file.
  const auto tmp_csv = dir / (stem + ".csv.tmp");
  const auto tmp_meta = dir / (stem + ".json.tmp");
  {
    std::ofstream out(tmp_csv, std::ios::binary | std::ios::trunc);
    out << csv;
  }
  {
    std::ofstream out(tmp_meta, std::ios::binary | std::ios::trunc);
    out << meta.dump(2) << "\n";
  }
  std::filesystem::rename(tmp_csv, dir / (stem + ".csv"));
  std::filesystem::rename(tmp_meta, dir / (stem + ".json"));
}

PotentialTable cached_potential_kernel(int L) {
  const std::string method = "mccrea-whipple";
  if (auto t = cache_load(2, TableKind::PotentialKernel, L, method)) return *t;
  DirLock lock(cache_dir());
  // Another process may have built it while we waited for the lock.
  if (auto t = cache_load(2, TableKind::PotentialKernel, L, method)) return *t;
  PotentialTable t = potential_kernel(L);
  cache_store(t);
  return t;
}

PotentialTable cached_green_table(int L, int d) {
  const std::string method = "poisson-dirichlet-3L";
  if (auto t = cache_load(d, TableKind::Green, L, method)) return *t;
  DirLock lock(cache_dir());
  if (auto t = cache_load(d, TableKind::Green, L, method)) return *t;
  PotentialTable t = green_table(L, d);
  cache_store(t);
  return t;
}

}  // namespace rgrade

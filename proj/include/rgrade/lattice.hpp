#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace rgrade {

using Coord = std::int64_t;

inline constexpr int kMaxDim = 8;

// Lattice site in Z^d, 1 <= d <= kMaxDim. Immutable value type.
class Point {
 public:
  Point() { c_.fill(0); }
  explicit Point(std::span<const Coord> coords);
  Point(std::initializer_list<Coord> coords);

  static Point zero(int d);
  // Point with coordinate `value` on `axis`, zero elsewhere.
  static Point axis(int d, int axis, Coord value);

  int dim() const { return d_; }
  Coord operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  Coord& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

  std::int64_t norm_sq() const;
  double norm() const;
  bool is_origin() const;

  bool operator==(const Point& o) const;
  bool operator!=(const Point& o) const { return !(*this == o); }
  // Lexicographic order, used wherever a deterministic enumeration is needed.
  bool operator<(const Point& o) const;

  std::string str() const;  // "(x1,x2,...)"

 private:
  std::array<Coord, kMaxDim> c_{};
  int d_ = 1;
};

// The 2d nearest neighbours of x, ordered +axis0, -axis0, +axis1, -axis1, ...
std::vector<Point> neighbors(const Point& x);

double norm(const Point& x);

// Finite centred domain: either the box {|x_i| <= L for all i} or the
// Euclidean disk {|x| <= R}. Both are connected and contain the origin.
class Domain {
 public:
  enum class Kind { Box, Disk };

  static Domain box(int d, int L);
  static Domain disk(int d, double R);

  Kind kind() const { return kind_; }
  int dim() const { return d_; }
  int box_radius() const { return L_; }      // Box only
  double disk_radius() const { return R_; }  // Disk only

  bool contains(const Point& x) const;
  // Deterministic lexicographic enumeration of all member points.
  std::vector<Point> points() const;
  std::size_t count() const;

 private:
  Domain() = default;
  Kind kind_ = Kind::Box;
  int d_ = 1;
  int L_ = 0;
  double R_ = 0.0;
};

// The lattice disk {x : |x| <= R}; rejects R < 1 (too small to be useful).
Domain disk_points(double R, int d);

// Row-major flat indexing of the box {|x_i| <= L}^d; the last axis varies
// fastest, so ascending flat order equals lexicographic point order.
class BoxIndexer {
 public:
  BoxIndexer() = default;
  BoxIndexer(int d, int L);

  int dim() const { return d_; }
  int radius() const { return L_; }
  std::size_t size() const { return size_; }

  bool contains(const Point& x) const;
  std::size_t flatten(const Point& x) const;
  Point unflatten(std::size_t i) const;

 private:
  int d_ = 1;
  int L_ = 0;
  std::int64_t side_ = 1;
  std::size_t size_ = 1;
};

}  // namespace rgrade

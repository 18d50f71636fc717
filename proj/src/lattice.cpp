#include "rgrade/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace rgrade {

namespace {

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) {
    throw std::invalid_argument("dimension must be in [1, " +
                                std::to_string(kMaxDim) + "], got " +
                                std::to_string(d));
  }
}

}  // namespace

Point::Point(std::span<const Coord> coords) {
  check_dim(static_cast<int>(coords.size()));
  d_ = static_cast<int>(coords.size());
  c_.fill(0);
  for (int i = 0; i < d_; ++i) c_[static_cast<std::size_t>(i)] = coords[static_cast<std::size_t>(i)];
}

Point::Point(std::initializer_list<Coord> coords)
    : Point(std::span<const Coord>(coords.begin(), coords.size())) {}

Point Point::zero(int d) {
  check_dim(d);
  Point p;
  p.d_ = d;
  return p;
}

Point Point::axis(int d, int axis, Coord value) {
  Point p = zero(d);
  if (axis < 0 || axis >= d) throw std::invalid_argument("axis out of range");
  p[axis] = value;
  return p;
}

std::int64_t Point::norm_sq() const {
  std::int64_t s = 0;
  for (int i = 0; i < d_; ++i) s += c_[static_cast<std::size_t>(i)] * c_[static_cast<std::size_t>(i)];
  return s;
}

double Point::norm() const { return std::sqrt(static_cast<double>(norm_sq())); }

bool Point::is_origin() const { return norm_sq() == 0; }

bool Point::operator==(const Point& o) const {
  if (d_ != o.d_) return false;
  for (int i = 0; i < d_; ++i)
    if (c_[static_cast<std::size_t>(i)] != o.c_[static_cast<std::size_t>(i)]) return false;
  return true;
}

bool Point::operator<(const Point& o) const {
  if (d_ != o.d_) return d_ < o.d_;
  for (int i = 0; i < d_; ++i) {
    if (c_[static_cast<std::size_t>(i)] != o.c_[static_cast<std::size_t>(i)])
      return c_[static_cast<std::size_t>(i)] < o.c_[static_cast<std::size_t>(i)];
  }
  return false;
}

std::string Point::str() const {
  std::string s = "(";
  for (int i = 0; i < d_; ++i) {
    if (i) s += ",";
    s += std::to_string(c_[static_cast<std::size_t>(i)]);
  }
  return s + ")";
}

std::vector<Point> neighbors(const Point& x) {
  std::vector<Point> out;
  out.reserve(2 * static_cast<std::size_t>(x.dim()));
  for (int a = 0; a < x.dim(); ++a) {
    Point p = x;
    p[a] = x[a] + 1;
    out.push_back(p);
    p[a] = x[a] - 1;
    out.push_back(p);
  }
  return out;
}

double norm(const Point& x) { return x.norm(); }

Domain Domain::box(int d, int L) {
  check_dim(d);
  if (L < 0) throw std::invalid_argument("box radius must be nonnegative");
  Domain dom;
  dom.kind_ = Kind::Box;
  dom.d_ = d;
  dom.L_ = L;
  return dom;
}

Domain Domain::disk(int d, double R) {
  check_dim(d);
  if (!(R >= 1.0)) throw std::invalid_argument("disk radius must be at least 1 (domain too small)");
  Domain dom;
  dom.kind_ = Kind::Disk;
  dom.d_ = d;
  dom.R_ = R;
  dom.L_ = static_cast<int>(std::floor(R));
  return dom;
}

bool Domain::contains(const Point& x) const {
  if (x.dim() != d_) return false;
  if (kind_ == Kind::Box) {
    for (int i = 0; i < d_; ++i)
      if (x[i] > L_ || x[i] < -L_) return false;
    return true;
  }
  // Integer fast path keeps borderline radii exact when R is integral.
  const double rfloor = std::floor(R_);
  if (rfloor == R_) {
    const std::int64_t r = static_cast<std::int64_t>(rfloor);
    return x.norm_sq() <= r * r;
  }
  return static_cast<double>(x.norm_sq()) <= R_ * R_;
}

std::vector<Point> Domain::points() const {
  std::vector<Point> out;
  const BoxIndexer box(d_, L_);
  for (std::size_t i = 0; i < box.size(); ++i) {
    Point p = box.unflatten(i);
    if (contains(p)) out.push_back(p);
  }
  return out;
}

std::size_t Domain::count() const {
  if (kind_ == Kind::Box) return BoxIndexer(d_, L_).size();
  std::size_t n = 0;
  const BoxIndexer box(d_, L_);
  for (std::size_t i = 0; i < box.size(); ++i)
    if (contains(box.unflatten(i))) ++n;
  return n;
}

Domain disk_points(double R, int d) { return Domain::disk(d, R); }

BoxIndexer::BoxIndexer(int d, int L) : d_(d), L_(L) {
  check_dim(d);
  if (L < 0) throw std::invalid_argument("box radius must be nonnegative");
  side_ = 2 * static_cast<std::int64_t>(L) + 1;
  size_ = 1;
  for (int i = 0; i < d; ++i) size_ *= static_cast<std::size_t>(side_);
}

bool BoxIndexer::contains(const Point& x) const {
  if (x.dim() != d_) return false;
  for (int i = 0; i < d_; ++i)
    if (x[i] > L_ || x[i] < -L_) return false;
  return true;
}

std::size_t BoxIndexer::flatten(const Point& x) const {
  std::size_t idx = 0;
  for (int i = 0; i < d_; ++i) {
    idx = idx * static_cast<std::size_t>(side_) +
          static_cast<std::size_t>(x[i] + L_);
  }
  return idx;
}

Point BoxIndexer::unflatten(std::size_t i) const {
  Point p = Point::zero(d_);
  for (int a = d_ - 1; a >= 0; --a) {
    p[a] = static_cast<Coord>(i % static_cast<std::size_t>(side_)) - L_;
    i /= static_cast<std::size_t>(side_);
  }
  return p;
}

}  // namespace rgrade

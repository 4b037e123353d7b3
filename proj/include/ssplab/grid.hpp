#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ssplab {

/// Uniform 2D scalar field, cell-centered, row index i along x (horizontal),
/// j along y (vertical). 1D problems use ny == 1.
struct GridField {
  int nx = 0, ny = 0;
  double dx = 1.0, dy = 1.0;
  std::vector<double> v;

  GridField() = default;
  GridField(int nx_, int ny_, double dx_, double dy_, double fill = 0.0)
      : nx(nx_), ny(ny_), dx(dx_), dy(dy_), v(static_cast<size_t>(nx_) * ny_, fill) {
    if (nx_ <= 0 || ny_ <= 0 || dx_ <= 0.0 || dy_ <= 0.0)
      throw std::invalid_argument("GridField: bad shape");
  }

  double& at(int i, int j) { return v[static_cast<size_t>(j) * nx + i]; }
  double at(int i, int j) const { return v[static_cast<size_t>(j) * nx + i]; }
  size_t size() const { return v.size(); }

  bool same_shape(const GridField& o) const {
    return nx == o.nx && ny == o.ny && dx == o.dx && dy == o.dy;
  }

  double x_of(int i) const { return (i + 0.5) * dx; }
  double y_of(int j) const { return (j + 0.5) * dy; }

  GridField& operator+=(const GridField& o) {
    assert(same_shape(o));
    for (size_t k = 0; k < v.size(); ++k) v[k] += o.v[k];
    return *this;
  }
  GridField& operator-=(const GridField& o) {
    assert(same_shape(o));
    for (size_t k = 0; k < v.size(); ++k) v[k] -= o.v[k];
    return *this;
  }
  GridField& operator*=(double a) {
    for (double& x : v) x *= a;
    return *this;
  }

  double min() const {
    double m = v.empty() ? 0.0 : v[0];
    for (double x : v) m = std::min(m, x);
    return m;
  }
  double max() const {
    double m = v.empty() ? 0.0 : v[0];
    for (double x : v) m = std::max(m, x);
    return m;
  }
  double max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
};

inline GridField operator+(GridField a, const GridField& b) { return a += b; }
inline GridField operator-(GridField a, const GridField& b) { return a -= b; }
inline GridField operator*(double s, GridField a) { return a *= s; }

inline double dot(const GridField& a, const GridField& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.v.size(); ++k) s += a.v[k] * b.v[k];
  return s;
}

inline double norm2(const GridField& a) { return std::sqrt(dot(a, a)); }

}  // namespace ssplab

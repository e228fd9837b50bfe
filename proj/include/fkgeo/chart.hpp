#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fkgeo/errors.hpp"

namespace fkgeo {

using Point = std::vector<double>;

// Single coordinate chart: names (t first), a sampling box, and optional
// hard limits from the expression domain (reciprocal warp needs t > -t0;
// warped models are otherwise defined on all of R^m, so geodesics may
// leave the sampling box without leaving the chart).
struct Chart {
  std::vector<std::string> coords;
  std::vector<std::pair<double, double>> box;       // sampling box
  std::vector<std::pair<double, double>> hard_box;  // expression domain

  int dim() const { return static_cast<int>(coords.size()); }

  static Chart make(int m, std::pair<double, double> t_interval,
                    std::pair<double, double> fiber_interval);

  bool in_box(const Point& p) const;
  bool in_hard_box(const Point& p) const;
};

// Deterministic random stream. Uniforms are derived from raw mt19937_64
// output rather than std::uniform_real_distribution so that sequences are
// reproducible across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double gaussian() {
    // Box-Muller; one value per call keeps the stream simple.
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Unit vector w.r.t. the Euclidean coordinate norm.
  Eigen::VectorXd unit_vector(int dim) {
    Eigen::VectorXd v(dim);
    double n2 = 0.0;
    do {
      for (int i = 0; i < dim; ++i) v[i] = gaussian();
      n2 = v.squaredNorm();
    } while (n2 < 1e-12);
    return v / std::sqrt(n2);
  }

  Point point_in(const Chart& chart) {
    Point p(static_cast<std::size_t>(chart.dim()));
    for (int i = 0; i < chart.dim(); ++i) {
      const auto& [lo, hi] = chart.box[static_cast<std::size_t>(i)];
      p[static_cast<std::size_t>(i)] = uniform(lo, hi);
    }
    return p;
  }

 private:
  std::mt19937_64 gen_;
};

inline Chart Chart::make(int m, std::pair<double, double> t_interval,
                         std::pair<double, double> fiber_interval) {
  if (m < 3 || m % 2 == 0)
    throw InvalidParam("chart dimension must be odd and >= 3, got " + std::to_string(m));
  Chart c;
  c.coords.push_back("t");
  for (int i = 1; i < m; ++i) c.coords.push_back("x" + std::to_string(i));
  c.box.assign(static_cast<std::size_t>(m), fiber_interval);
  c.box[0] = t_interval;
  const double inf = std::numeric_limits<double>::infinity();
  c.hard_box.assign(static_cast<std::size_t>(m), {-inf, inf});
  return c;
}

inline bool Chart::in_box(const Point& p) const {
  for (int i = 0; i < dim(); ++i) {
    const auto& [lo, hi] = box[static_cast<std::size_t>(i)];
    if (p[static_cast<std::size_t>(i)] < lo || p[static_cast<std::size_t>(i)] > hi) return false;
  }
  return true;
}

inline bool Chart::in_hard_box(const Point& p) const {
  for (int i = 0; i < dim(); ++i) {
    const auto& [lo, hi] = hard_box[static_cast<std::size_t>(i)];
    if (p[static_cast<std::size_t>(i)] < lo || p[static_cast<std::size_t>(i)] > hi) return false;
  }
  return true;
}

}  // namespace fkgeo

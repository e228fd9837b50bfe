#pragma once

#include <vector>

#include <Eigen/Core>

#include "fkgeo/chart.hpp"
#include "fkgeo/fields.hpp"

namespace fkgeo {

// Piecewise-straight coordinate path.
struct Polyline {
  std::vector<Point> pts;

  static Polyline segment(const Point& a, const Point& b) { return {{a, b}}; }
  // Rectangle loop from `base` spanned by coordinate axes (i, j) with the
  // given signed side lengths; starts and ends at base.
  static Polyline rectangle(const Point& base, int axis_i, int axis_j,
                            double side_i, double side_j);
  double coordinate_length() const;
};

enum class TransportKind { Cov2, Frame };

struct TransportOptions {
  int min_steps = 100;
  double steps_per_unit_length = 1000.0;
  double self_check_tol = 1e-8;
};

// Parallel-transport a (0,2) tensor (Cov2) or a matrix of column vectors
// (Frame) along the path with a classical 4th-order one-step method.
// The metric is always co-transported; its deviation from g(endpoint) is the
// self check, measured in the orthonormal frame at the endpoint.
// Throws StepTooCoarse when the self check exceeds the tolerance.
Eigen::MatrixXd parallel_transport(const MetricField& g, const Polyline& path,
                                   const Eigen::MatrixXd& value0, TransportKind kind,
                                   const TransportOptions& opts = {});

}  // namespace fkgeo

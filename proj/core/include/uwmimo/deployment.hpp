#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "uwmimo/random.hpp"

namespace uwmimo::scenario {

using Point = std::array<double, 3>;

double distance(const Point& a, const Point& b);

/// Master at the origin, slaves on the horizontal plane through it.
struct DeploymentGeometry {
  Point master{0.0, 0.0, 0.0};
  std::vector<Point> slaves;
  std::vector<Point> base_stations;

  /// Master first, then slaves.
  std::vector<Point> transmitters() const;
};

struct DeploymentOptions {
  double radius_m = 10.0;
  double min_spacing_m = 0.0;
  double bs_offset_m = 30.0;
  double bs_depth_m = 20.0;
  double bs_spacing_m = 5.0;
  std::size_t n_base = 1;
  /// Rejection-sampling budget per slave before giving up.
  std::size_t max_attempts = 10000;
};

/// Slaves uniform in the disc of `radius_m` around the master, at least
/// `min_spacing_m` from every other node. Base stations sit at
/// (bs_offset + k * bs_spacing, 0, -bs_depth). Throws ConfigError when the
/// spacing constraint cannot be met.
DeploymentGeometry deploy_random(std::size_t n_slaves, const DeploymentOptions& options, Rng& rng);

}  // namespace uwmimo::scenario

#include "uwmimo/deployment.hpp"

#include <cmath>
#include <numbers>

#include "uwmimo/error.hpp"

namespace uwmimo::scenario {

double distance(const Point& a, const Point& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  const double dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<Point> DeploymentGeometry::transmitters() const {
  std::vector<Point> out{master};
  out.insert(out.end(), slaves.begin(), slaves.end());
  return out;
}

DeploymentGeometry deploy_random(std::size_t n_slaves, const DeploymentOptions& options, Rng& rng) {
  detail::require(options.radius_m > 0.0, "deployment radius must be positive");
  detail::require(options.min_spacing_m >= 0.0, "minimum spacing must be non-negative");
  detail::require(options.n_base >= 1, "need at least one base station");

  DeploymentGeometry g;
  for (std::size_t b = 0; b < options.n_base; ++b) {
    g.base_stations.push_back(
        {options.bs_offset_m + static_cast<double>(b) * options.bs_spacing_m, 0.0, -options.bs_depth_m});
  }

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t s = 0; s < n_slaves; ++s) {
    bool placed = false;
    for (std::size_t attempt = 0; attempt < options.max_attempts && !placed; ++attempt) {
      // sqrt on the radius keeps the density uniform over the disc area.
      const double r = options.radius_m * std::sqrt(unit(rng));
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      const Point p{r * std::cos(theta), r * std::sin(theta), 0.0};
      placed = distance(p, g.master) >= options.min_spacing_m;
      for (const auto& q : g.slaves) placed = placed && distance(p, q) >= options.min_spacing_m;
      if (placed) g.slaves.push_back(p);
    }
    if (!placed) throw ConfigError("cannot place slaves with the requested minimum spacing");
  }
  return g;
}

}  // namespace uwmimo::scenario

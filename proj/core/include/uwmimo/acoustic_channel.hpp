#pragma once

#include <functional>
#include <span>
#include <vector>

#include "uwmimo/random.hpp"

namespace uwmimo::channel {

/// Absorption coefficient alpha(f) in 1/m (power, natural-log base).
using AbsorptionFn = std::function<double(double frequency_hz)>;

AbsorptionFn constant_absorption(double per_m);
/// Thorp's empirical absorption, converted from dB/km to 1/m.
AbsorptionFn thorp_absorption();

struct PathSpec {
  double distance_m = 1.0;
  double scattering_loss = 1.0;
  double spreading_exponent = 1.5;
  AbsorptionFn absorption = constant_absorption(0.0);

  void validate() const;
};

/// xi * d^beta * exp(alpha(f) d)
double path_attenuation(double frequency_hz, const PathSpec& path);
/// 1 / sqrt(path_attenuation)
double path_gain(double frequency_hz, const PathSpec& path);

/// Bessel function of the first kind, order zero. Absolute error below 1e-12
/// for |x| <= 1e3. Throws std::invalid_argument for non-finite input.
double bessel_j0(double x);

struct MultipathChannel {
  std::vector<double> path_gains;     ///< h_p, path 0 first
  std::vector<double> path_delays_s;  ///< tau_p

  void validate() const;
  double amplitude_sum() const;
};

/// Direct path plus surface/bottom bounces, each `excess_m` longer than the
/// direct one. `prototype` supplies scattering, spreading and absorption.
std::vector<PathSpec> bounce_paths(double direct_distance_m, std::span<const double> excess_m,
                                   const PathSpec& prototype);

MultipathChannel build_channel(double frequency_hz, std::span<const PathSpec> paths,
                               double sound_speed_mps);

struct EnvelopePdfOptions {
  /// Standard deviation, relative to the amplitude sum, of the circular
  /// Gaussian convergence factor exp(-2 pi^2 s^2 x^2) applied to the integrand.
  double smoothing = 2e-4;
  /// Truncation target for the tail of the damped integrand.
  double tolerance = 1e-8;
  /// Gauss-Legendre nodes per panel; each panel spans one period of the
  /// fastest oscillation in the Bessel product.
  int nodes_per_panel = 8;
};

/// Envelope density of a >=2-path channel, evaluated from the Bessel-product
/// integral. The path-dependent part of the integrand is tabulated once, so
/// repeated pdf/cdf evaluations on the same channel are cheap.
class EnvelopeDensity {
 public:
  explicit EnvelopeDensity(const MultipathChannel& channel, const EnvelopePdfOptions& options = {});

  double pdf(double z) const;

  /// CDF obtained by adaptive Simpson integration of pdf() over z; returns
  /// values at each requested point (any order).
  std::vector<double> cdf(std::span<const double> z) const;

  /// Total probability mass integrated over [0, support_limit()].
  double total_mass() const;

  /// Amplitude sum plus the smoothing tail; the density is zero beyond it.
  double support_limit() const { return support_limit_; }
  double truncation_point() const { return upper_limit_; }

 private:
  struct Knot {
    double z;
    double cumulative;
  };
  void build_cdf_table() const;

  std::vector<double> nodes_;
  std::vector<double> weighted_;  ///< w_k * x_k * prod_p J0(2 pi h_p x_k) * damping
  double support_limit_ = 0.0;
  double upper_limit_ = 0.0;
  mutable std::vector<Knot> table_;
};

/// p_h(z) for a single z. Throws DegenerateChannelError for single-path
/// channels and std::invalid_argument for z < 0.
double envelope_pdf(const MultipathChannel& channel, double z, const EnvelopePdfOptions& options = {});

struct EnvelopeSample {
  double envelope = 0.0;
  double phase_delay_s = 0.0;
};

/// |sum_p h_p e^{j theta_p}| with independent uniform theta_p, plus a delay
/// uniform on [-1/(2f), 1/(2f)), i.e. a carrier phase uniform on [-pi, pi).
EnvelopeSample sample_envelope(const MultipathChannel& channel, double carrier_hz, Rng& rng);

}  // namespace uwmimo::channel

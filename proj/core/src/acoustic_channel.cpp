#include "uwmimo/acoustic_channel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "uwmimo/error.hpp"

namespace uwmimo::channel {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights on [-1, 1] via Newton on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

AbsorptionFn constant_absorption(double per_m) {
  detail::require(per_m >= 0.0 && std::isfinite(per_m), "absorption must be finite and non-negative");
  return [per_m](double) { return per_m; };
}

AbsorptionFn thorp_absorption() {
  return [](double frequency_hz) {
    const double f = frequency_hz / 1e3;  // kHz
    const double f2 = f * f;
    const double db_per_km = 0.11 * f2 / (1.0 + f2) + 44.0 * f2 / (4100.0 + f2) + 2.75e-4 * f2 + 0.003;
    return db_per_km * std::log(10.0) / 10.0 / 1e3;
  };
}

void PathSpec::validate() const {
  detail::require(distance_m > 0.0 && std::isfinite(distance_m), "path distance must be positive");
  detail::require(scattering_loss > 0.0, "scattering loss must be positive");
  detail::require(spreading_exponent >= 0.0, "spreading exponent must be non-negative");
  detail::require(static_cast<bool>(absorption), "absorption callable is empty");
}

double path_attenuation(double frequency_hz, const PathSpec& path) {
  detail::require(frequency_hz > 0.0, "frequency must be positive");
  path.validate();
  const double alpha = path.absorption(frequency_hz);
  detail::require(alpha >= 0.0, "absorption coefficient must be non-negative");
  return path.scattering_loss * std::pow(path.distance_m, path.spreading_exponent) *
         std::exp(alpha * path.distance_m);
}

double path_gain(double frequency_hz, const PathSpec& path) {
  return 1.0 / std::sqrt(path_attenuation(frequency_hz, path));
}

void MultipathChannel::validate() const {
  detail::require(!path_gains.empty(), "channel needs at least one path");
  detail::require(path_gains.size() == path_delays_s.size(), "gain/delay lists differ in length");
  for (double g : path_gains) detail::require(g > 0.0 && std::isfinite(g), "path gains must be positive");
  for (double d : path_delays_s) detail::require(d >= 0.0, "path delays must be non-negative");
}

double MultipathChannel::amplitude_sum() const {
  return std::accumulate(path_gains.begin(), path_gains.end(), 0.0);
}

std::vector<PathSpec> bounce_paths(double direct_distance_m, std::span<const double> excess_m,
                                   const PathSpec& prototype) {
  std::vector<PathSpec> paths;
  paths.reserve(excess_m.size());
  for (double extra : excess_m) {
    detail::require(extra >= 0.0, "excess path length must be non-negative");
    PathSpec p = prototype;
    p.distance_m = direct_distance_m + extra;
    paths.push_back(std::move(p));
  }
  return paths;
}

MultipathChannel build_channel(double frequency_hz, std::span<const PathSpec> paths,
                               double sound_speed_mps) {
  detail::require(sound_speed_mps > 0.0, "sound speed must be positive");
  MultipathChannel ch;
  for (const auto& p : paths) {
    ch.path_gains.push_back(path_gain(frequency_hz, p));
    ch.path_delays_s.push_back(p.distance_m / sound_speed_mps);
  }
  ch.validate();
  return ch;
}

EnvelopeDensity::EnvelopeDensity(const MultipathChannel& channel, const EnvelopePdfOptions& options) {
  channel.validate();
  if (channel.path_gains.size() < 2) {
    throw DegenerateChannelError("single-path channel has a deterministic envelope");
  }
  detail::require(options.smoothing > 0.0 && options.tolerance > 0.0 && options.nodes_per_panel >= 4,
                  "invalid envelope pdf options");

  const double amp = channel.amplitude_sum();
  const double s = options.smoothing * amp;
  const double c = 2.0 * kPi * kPi * s * s;
  support_limit_ = amp + 10.0 * s;
  // Tail of x * exp(-c x^2), scaled by 4 pi^2 z, stays below the tolerance.
  upper_limit_ = std::sqrt(std::log(4.0 * kPi * kPi * support_limit_ / (2.0 * c * options.tolerance)) / c);

  const double fastest = amp + support_limit_;  // cycles per unit x
  const auto panels = static_cast<std::size_t>(std::ceil(upper_limit_ * fastest));
  const double width = upper_limit_ / static_cast<double>(panels);

  std::vector<double> gx;
  std::vector<double> gw;
  gauss_legendre(options.nodes_per_panel, gx, gw);

  nodes_.reserve(panels * gx.size());
  weighted_.reserve(panels * gx.size());
  for (std::size_t p = 0; p < panels; ++p) {
    const double a = p * width;
    for (std::size_t k = 0; k < gx.size(); ++k) {
      const double x = a + 0.5 * width * (gx[k] + 1.0);
      // Path 0 enters once outside the product over p = 1..N, exactly like
      // every other path, so a single product over the list covers both.
      double prod = x * std::exp(-c * x * x);
      for (double h : channel.path_gains) prod *= bessel_j0(2.0 * kPi * h * x);
      nodes_.push_back(x);
      weighted_.push_back(0.5 * width * gw[k] * prod);
    }
  }
}

double EnvelopeDensity::pdf(double z) const {
  detail::require(z >= 0.0 && std::isfinite(z), "envelope value must be finite and non-negative");
  if (z == 0.0 || z > support_limit_) return 0.0;
  const double w = 2.0 * kPi * z;
  double sum = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) sum += weighted_[k] * bessel_j0(w * nodes_[k]);
  const double value = 4.0 * kPi * kPi * z * sum;
  // Quadrature residue can dip slightly below zero where the density vanishes.
  return std::max(value, 0.0);
}

void EnvelopeDensity::build_cdf_table() const {
  if (!table_.empty()) return;
  constexpr double kTolerance = 2e-7;
  constexpr int kMaxDepth = 40;

  struct Frame {
    double a, b, fa, fm, fb, whole, tol;
    int depth;
  };
  auto simpson = [](double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  };

  // Seed with a uniform partition so narrow spikes cannot hide between
  // the first few samples.
  constexpr int kSeedPanels = 64;
  const double h = support_limit_ / kSeedPanels;
  table_.push_back({0.0, 0.0});
  double running = 0.0;
  for (int i = 0; i < kSeedPanels; ++i) {
    const double a = i * h;
    const double b = (i + 1) * h;
    const double fa = pdf(a);
    const double fb = pdf(b);
    const double fm = pdf(0.5 * (a + b));
    std::vector<Frame> stack{{a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), kTolerance / kSeedPanels, 0}};
    while (!stack.empty()) {
      Frame f = stack.back();
      stack.pop_back();
      const double m = 0.5 * (f.a + f.b);
      const double flm = pdf(0.5 * (f.a + m));
      const double frm = pdf(0.5 * (m + f.b));
      const double left = simpson(f.a, m, f.fa, flm, f.fm);
      const double right = simpson(m, f.b, f.fm, frm, f.fb);
      if (f.depth >= kMaxDepth || std::abs(left + right - f.whole) <= 15.0 * f.tol) {
        const double correction = (left + right - f.whole) / 15.0;
        running += left;
        table_.push_back({m, running});
        running += right + correction;
        table_.push_back({f.b, running});
        continue;
      }
      // Right half pushed first so the left half is finished first and the
      // table stays sorted.
      stack.push_back({m, f.b, f.fm, frm, f.fb, right, 0.5 * f.tol, f.depth + 1});
      stack.push_back({f.a, m, f.fa, flm, f.fm, left, 0.5 * f.tol, f.depth + 1});
    }
  }
}

std::vector<double> EnvelopeDensity::cdf(std::span<const double> z) const {
  build_cdf_table();
  std::vector<double> out;
  out.reserve(z.size());
  for (double v : z) {
    if (v <= 0.0) {
      out.push_back(0.0);
      continue;
    }
    if (v >= table_.back().z) {
      out.push_back(table_.back().cumulative);
      continue;
    }
    auto it = std::upper_bound(table_.begin(), table_.end(), v,
                               [](double value, const Knot& k) { return value < k.z; });
    const Knot& hi = *it;
    const Knot& lo = *(it - 1);
    const double t = (v - lo.z) / (hi.z - lo.z);
    out.push_back(lo.cumulative + t * (hi.cumulative - lo.cumulative));
  }
  return out;
}

double EnvelopeDensity::total_mass() const {
  build_cdf_table();
  return table_.back().cumulative;
}

double envelope_pdf(const MultipathChannel& channel, double z, const EnvelopePdfOptions& options) {
  detail::require(z >= 0.0 && std::isfinite(z), "envelope value must be finite and non-negative");
  return EnvelopeDensity(channel, options).pdf(z);
}

EnvelopeSample sample_envelope(const MultipathChannel& channel, double carrier_hz, Rng& rng) {
  channel.validate();
  detail::require(carrier_hz > 0.0, "carrier frequency must be positive");
  std::uniform_real_distribution<double> phase(-kPi, kPi);
  EnvelopeSample out;
  if (channel.path_gains.size() == 1) {
    out.envelope = channel.path_gains.front();
  } else {
    std::complex<double> sum{0.0, 0.0};
    for (double h : channel.path_gains) sum += std::polar(h, phase(rng));
    out.envelope = std::abs(sum);
  }
  out.phase_delay_s = phase(rng) / (2.0 * kPi * carrier_hz);
  return out;
}

}  // namespace uwmimo::channel

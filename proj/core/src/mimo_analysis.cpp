#include "uwmimo/mimo_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uwmimo/error.hpp"

namespace uwmimo::mimo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Phase of transmitter i relative to the common carrier rotation 2 pi f t.
// Expanding 2 pi (f + e_f)(t + e_t) - 2 pi f t keeps the small terms exact
// instead of subtracting two large phases.
double relative_phase(const TransmitterState& s, double carrier_hz, double t) {
  const double residual_control = s.phase_control_rad - kTwoPi * carrier_hz * s.delay_s;
  return kTwoPi * (carrier_hz * s.time_error + s.freq_error_hz * (t + s.time_error)) + residual_control;
}

double scale(const LinkBudget& b) { return b.amplitude * b.amplitude / b.noise_power; }

}  // namespace

void LinkBudget::validate() const {
  detail::require(amplitude > 0.0 && noise_power > 0.0 && carrier_hz > 0.0 && snr_threshold > 0.0 &&
                      doppler_scale > 0.0 && n_base_stations >= 1,
                  "link budget values must be positive");
  detail::require(csi_bits >= 0.0 && max_distance_m >= 0.0, "CSI length and distance must be non-negative");
}

std::vector<double> optimal_phase_vector(std::span<const TransmitterState> states, double carrier_hz) {
  std::vector<double> phases;
  phases.reserve(states.size());
  for (const auto& s : states) {
    double phi = std::fmod(kTwoPi * carrier_hz * s.delay_s, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
    phases.push_back(phi);
  }
  return phases;
}

double beamforming_objective(std::span<const TransmitterState> states, std::span<const double> phases,
                             double carrier_hz, double t) {
  detail::require(states.size() == phases.size(), "one phase per transmitter");
  std::complex<double> sum{0.0, 0.0};
  for (std::size_t i = 0; i < states.size(); ++i) {
    sum += std::polar(states[i].envelope, kTwoPi * carrier_hz * (t - states[i].delay_s) + phases[i]);
  }
  return std::norm(sum);
}

double snr_ideal(std::span<const double> envelopes, const LinkBudget& budget, Scheme scheme) {
  detail::require(!envelopes.empty(), "need at least one transmitter");
  budget.validate();
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double h : envelopes) {
    detail::require(h >= 0.0, "envelopes must be non-negative");
    sum += h;
    sum_sq += h * h;
  }
  return scale(budget) * (scheme == Scheme::Beamforming ? sum * sum : sum_sq);
}

double snr_with_errors(std::span<const TransmitterState> states, const LinkBudget& budget, Scheme scheme,
                       double t, StbcModel stbc_model) {
  detail::require(!states.empty(), "need at least one transmitter");
  const double k = scale(budget);
  const double f = budget.carrier_hz;

  if (scheme == Scheme::Beamforming) {
    std::complex<double> sum{0.0, 0.0};
    for (const auto& s : states) sum += std::polar(s.envelope, relative_phase(s, f, t));
    return k * std::norm(sum);
  }

  if (stbc_model == StbcModel::Printed) {
    double sum = 0.0;
    for (const auto& s : states) sum += std::abs(std::polar(s.envelope * s.envelope, relative_phase(s, f, t)));
    return k * sum;
  }

  double sum = 0.0;
  std::size_t i = 0;
  for (; i + 1 < states.size(); i += 2) {
    const auto& a = states[i];
    const auto& b = states[i + 1];
    const double ga = a.envelope * a.envelope;
    const double gb = b.envelope * b.envelope;
    if (ga + gb == 0.0) continue;
    const auto combined = std::polar(ga, kTwoPi * a.freq_error_hz * t) + std::polar(gb, -kTwoPi * b.freq_error_hz * t);
    sum += std::norm(combined) / (ga + gb);
  }
  if (i < states.size()) sum += states[i].envelope * states[i].envelope;
  return k * sum;
}

double coherence_time(double carrier_hz, double doppler_scale) {
  detail::require(carrier_hz > 0.0 && doppler_scale > 0.0, "carrier and Doppler scale must be positive");
  return 0.423 / (doppler_scale * carrier_hz);
}

double effective_time_snr(std::span<const TransmitterState> states, const LinkBudget& budget, Scheme scheme,
                          const ScanOptions& options) {
  budget.validate();
  detail::require(options.t_step_s > 0.0, "scan step must be positive");
  const double horizon = options.horizon_s > 0.0 ? options.horizon_s
                                                 : 10.0 * coherence_time(budget.carrier_hz, budget.doppler_scale);
  const double eta = budget.snr_threshold;
  auto below = [&](double t) { return snr_with_errors(states, budget, scheme, t, options.stbc_model) < eta; };

  if (below(0.0)) return 0.0;

  const auto steps = static_cast<std::size_t>(std::ceil(horizon / options.t_step_s));
  double prev = 0.0;
  for (std::size_t i = 1; i <= steps; ++i) {
    const double t = std::min(static_cast<double>(i) * options.t_step_s, horizon);
    if (below(t)) {
      double lo = prev;
      double hi = t;
      while (hi - lo > options.bisection_tolerance_s) {
        const double mid = 0.5 * (lo + hi);
        (below(mid) ? hi : lo) = mid;
      }
      return hi;
    }
    prev = t;
  }
  return kNeverViolated;
}

double effective_time(std::span<const TransmitterState> states, const LinkBudget& budget, Scheme scheme,
                      const ScanOptions& options) {
  const double tc = coherence_time(budget.carrier_hz, budget.doppler_scale);
  ScanOptions scan = options;
  // Crossings after T_c cannot change the minimum.
  if (scan.horizon_s <= 0.0 || scan.horizon_s > tc) scan.horizon_s = tc;
  return std::min(effective_time_snr(states, budget, scheme, scan), tc);
}

double csi_time(const LinkBudget& budget, const sync::MediumParams& acoustic_medium) {
  acoustic_medium.validate();
  detail::require(budget.csi_bits >= 0.0 && budget.max_distance_m >= 0.0,
                  "CSI length and distance must be non-negative");
  return budget.csi_bits / acoustic_medium.bandwidth_hz +
         budget.max_distance_m / acoustic_medium.propagation_speed_mps;
}

Eigen::MatrixXcd channel_matrix(std::span<const double> envelopes, std::span<const double> delays_s,
                                std::size_t n_base, double carrier_hz) {
  detail::require(n_base >= 1, "need at least one base station");
  detail::require(envelopes.size() == delays_s.size() && envelopes.size() % n_base == 0 && !envelopes.empty(),
                  "envelope/delay lists must be N x N_b");
  const std::size_t n = envelopes.size() / n_base;
  Eigen::MatrixXcd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n_base));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < n_base; ++b) {
      const std::size_t idx = i * n_base + b;
      h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b)) =
          std::polar(envelopes[idx], -kTwoPi * carrier_hz * delays_s[idx]);
    }
  }
  return h;
}

double capacity(double snr0, const Eigen::MatrixXcd& channel, std::size_t n_base) {
  detail::require(snr0 >= 0.0 && std::isfinite(snr0), "snr0 must be finite and non-negative");
  detail::require(n_base >= 1 && channel.cols() == static_cast<Eigen::Index>(n_base) && channel.rows() >= 1,
                  "channel matrix must be N x N_b");
  if (snr0 == 0.0) return 0.0;
  const Eigen::Index n = channel.rows();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
  m.noalias() += (snr0 / static_cast<double>(n_base)) * channel * channel.adjoint();
  // Hermitian positive definite: log det = 2 sum log diag(L).
  Eigen::LLT<Eigen::MatrixXcd> llt(m);
  if (llt.info() != Eigen::Success) throw std::runtime_error("capacity: matrix is not positive definite");
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_det += std::log(llt.matrixL()(i, i).real());
  return 2.0 * log_det / std::numbers::ln2;
}

double throughput_upper_bound(double effective_time_s, double capacity_bits, double sync_total_s,
                              double csi_time_s) {
  detail::require(effective_time_s >= 0.0 && capacity_bits >= 0.0 && sync_total_s >= 0.0 && csi_time_s >= 0.0,
                  "throughput inputs must be non-negative");
  if (effective_time_s == 0.0) return 0.0;
  return effective_time_s * capacity_bits / (sync_total_s + csi_time_s + effective_time_s);
}

double to_db(double linear) { return 10.0 * std::log10(linear); }
double from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace uwmimo::mimo

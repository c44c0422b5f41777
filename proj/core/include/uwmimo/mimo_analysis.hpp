#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uwmimo/sync_protocol.hpp"

namespace uwmimo::mimo {

enum class Scheme { Beamforming, SpaceTimeCoding };

/// How the error-degraded STBC SNR is evaluated.
enum class StbcModel {
  /// Per-transmitter modulus of h_i^2 e^{j theta_i}: phase errors cancel and
  /// the SNR equals the ideal value at every t.
  Printed,
  /// Not from the analytical model: Alamouti pairs (1,2), (3,4), ... combined
  /// with CSI captured at t = 0, so each pair loses coherence at the rate of
  /// its frequency errors. An unpaired last transmitter contributes h^2.
  PairwiseStaleCsi,
};

struct TransmitterState {
  double envelope = 0.0;           ///< h_i
  double delay_s = 0.0;            ///< tau_i
  double phase_control_rad = 0.0;  ///< phi_i
  double freq_error_hz = 0.0;      ///< epsilon_{i,f}
  double time_error = 0.0;         ///< epsilon_{i,t}
};

struct LinkBudget {
  double amplitude = 1.0;       ///< A; A^2 is the per-transmitter power
  double noise_power = 1.0;     ///< sigma^2, same units as A^2
  double carrier_hz = 10e3;     ///< f
  double snr_threshold = 1.0;   ///< eta, linear
  double doppler_scale = 1e-4;  ///< a
  std::size_t n_base_stations = 1;
  double csi_bits = 0.0;
  double max_distance_m = 0.0;

  void validate() const;
};

/// phi_i = 2 pi f tau_i wrapped to [0, 2 pi): cancels each channel delay.
std::vector<double> optimal_phase_vector(std::span<const TransmitterState> states, double carrier_hz);

/// |h^T v_phi|^2 at time t for the given phase vector (the beamforming
/// objective without the A^2 / sigma^2 scale).
double beamforming_objective(std::span<const TransmitterState> states, std::span<const double> phases,
                             double carrier_hz, double t);

/// BF: A^2 (sum h)^2 / sigma^2.  STBC: A^2 sum h^2 / sigma^2.
double snr_ideal(std::span<const double> envelopes, const LinkBudget& budget, Scheme scheme);

/// SNR at time t after synchronization with each node's residual errors.
/// Any mismatch between phi_i and 2 pi f tau_i enters as a static phase.
double snr_with_errors(std::span<const TransmitterState> states, const LinkBudget& budget, Scheme scheme,
                       double t, StbcModel stbc_model = StbcModel::Printed);

struct ScanOptions {
  double t_step_s = 1e-3;
  /// Scan limit; <= 0 selects 10 coherence times.
  double horizon_s = 0.0;
  double bisection_tolerance_s = 1e-6;
  StbcModel stbc_model = StbcModel::Printed;
};

inline constexpr double kNeverViolated = std::numeric_limits<double>::infinity();

/// First t with SNR(t) < eta: coarse scan then bisection. Returns 0 when
/// SNR(0) is already below eta and kNeverViolated when the horizon is reached.
double effective_time_snr(std::span<const TransmitterState> states, const LinkBudget& budget, Scheme scheme,
                          const ScanOptions& options = {});

/// 0.423 / (a f)
double coherence_time(double carrier_hz, double doppler_scale);

/// min(effective_time_snr, coherence_time)
double effective_time(std::span<const TransmitterState> states, const LinkBudget& budget, Scheme scheme,
                      const ScanOptions& options = {});

/// L_CSI / B_ac + d_max / v_ac
double csi_time(const LinkBudget& budget, const sync::MediumParams& acoustic_medium);

/// N x N_b matrix with entries h_i e^{-j 2 pi f tau_i}. `envelopes` and
/// `delays` are laid out row-major as [transmitter][base station].
Eigen::MatrixXcd channel_matrix(std::span<const double> envelopes, std::span<const double> delays_s,
                                std::size_t n_base, double carrier_hz);

/// log2 det(I_N + (snr0 / N_b) H H^*)
double capacity(double snr0, const Eigen::MatrixXcd& channel, std::size_t n_base);

/// t_eff C / (sync + t_CSI + t_eff)
double throughput_upper_bound(double effective_time_s, double capacity_bits, double sync_total_s,
                              double csi_time_s);

double to_db(double linear);
double from_db(double db);

}  // namespace uwmimo::mimo

#pragma once

#include <functional>
#include <variant>

#include "uwmimo/random.hpp"

namespace uwmimo::clock {

/// Ratio a_n(t) of a slave oscillator frequency to the master's.
class DriftProfile {
 public:
  static DriftProfile constant(double ratio);
  /// a(t) = at_zero + slope * t
  static DriftProfile affine(double at_zero, double slope);
  static DriftProfile custom(std::function<double(double)> ratio_at);

  double operator()(double t) const;

  /// Mean of a(t) over [0, interval_s]. Constant and affine profiles are
  /// integrated exactly; custom profiles use 1000-panel midpoint quadrature.
  double average(double interval_s) const;

 private:
  struct Affine {
    double at_zero;
    double slope;
  };
  using Custom = std::function<double(double)>;

  explicit DriftProfile(std::variant<Affine, Custom> impl) : impl_(std::move(impl)) {}

  std::variant<Affine, Custom> impl_;
};

struct OscillatorSpec {
  double nominal_frequency_hz = 1.0;
  DriftProfile drift = DriftProfile::constant(1.0);
};

struct FrequencySyncResult {
  double estimated_beacon_hz = 0.0;
  double offset_hz = 0.0;
  double residual_error_hz = 0.0;
};

/// Zero-mean Gaussian frequency-estimation error with a configurable spread.
/// A zero standard deviation always yields exactly 0.
struct EstimationErrorModel {
  double std_dev_hz = 0.0;

  double draw(Rng& rng) const;
};

double average_relative_drift(const DriftProfile& profile, double interval_s);

/// f_s = k * f_c
double operating_frequency(const OscillatorSpec& oscillator, double multiplier);

/// Residual frequency error after synchronization: estimation error / k.
double frequency_sync_error(double estimation_error_hz, double multiplier);

/// Slave-side beacon estimate and the frequency offset it implies.
FrequencySyncResult beacon_frequency_estimate(double beacon_hz, double average_drift,
                                              double estimation_error_hz, double multiplier);

}  // namespace uwmimo::clock

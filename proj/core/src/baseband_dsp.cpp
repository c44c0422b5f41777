#include "uwmimo/baseband_dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "uwmimo/error.hpp"

namespace uwmimo::dsp {

namespace {

constexpr double kPi = std::numbers::pi;

double rrc_sample(double t, double a) {
  if (std::abs(t) < 1e-12) return 1.0 - a + 4.0 * a / kPi;
  if (a > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * a)) < 1e-12) {
    return a / std::sqrt(2.0) *
           ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * a)) + (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * a)));
  }
  const double x = 4.0 * a * t;
  return (std::sin(kPi * t * (1.0 - a)) + x * std::cos(kPi * t * (1.0 + a))) / (kPi * t * (1.0 - x * x));
}

// Autocorrelation of a real tap vector at `lag`.
double autocorr(const std::vector<double>& h, std::size_t lag) {
  double s = 0.0;
  for (std::size_t j = lag; j < h.size(); ++j) s += h[j] * h[j - lag];
  return s;
}

}  // namespace

cvec bpsk_modulate(std::span<const std::uint8_t> bits) {
  cvec out;
  out.reserve(bits.size());
  for (auto b : bits) out.emplace_back(b ? 1.0 : -1.0, 0.0);
  return out;
}

bitvec bpsk_demodulate(std::span<const cd> symbols) {
  bitvec out;
  out.reserve(symbols.size());
  for (const auto& s : symbols) out.push_back(s.real() >= 0.0 ? 1 : 0);
  return out;
}

void SrrcSpec::validate() const {
  detail::require(rolloff >= 0.0 && rolloff <= 1.0, "SRRC roll-off must lie in [0, 1]");
  detail::require(samples_per_symbol >= 2, "need at least 2 samples per symbol");
  detail::require(span_symbols >= 2 && span_symbols % 2 == 0, "SRRC span must be an even symbol count >= 2");
  detail::require(symbol_duration_s > 0.0, "symbol duration must be positive");
}

std::vector<double> srrc_taps(const SrrcSpec& spec) {
  spec.validate();
  const std::size_t sps = spec.samples_per_symbol;
  const std::size_t n = spec.tap_count();
  const std::size_t half = n / 2;
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = (static_cast<double>(i) - static_cast<double>(half)) / static_cast<double>(sps);
    h[i] = rrc_sample(t, spec.rolloff);
  }

  // A truncated SRRC leaves residual ISI in the TX/RX cascade. Refine the
  // symmetric half-taps with minimum-norm Gauss-Newton steps until the
  // cascade autocorrelation vanishes at every nonzero symbol lag.
  const std::size_t lags = spec.span_symbols;
  const auto unknowns = static_cast<Eigen::Index>(half + 1);
  for (int iter = 0; iter < 50; ++iter) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(lags));
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(lags), unknowns);
    const double peak = autocorr(h, 0);
    double worst = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) {
      const std::size_t lag = k * sps;
      r(static_cast<Eigen::Index>(k - 1)) = autocorr(h, lag);
      worst = std::max(worst, std::abs(r(static_cast<Eigen::Index>(k - 1))) / peak);
      for (std::size_t j = 0; j < n; ++j) {
        double d = 0.0;
        if (j + lag < n) d += h[j + lag];
        if (j >= lag) d += h[j - lag];
        const std::size_t u = j <= half ? j : n - 1 - j;
        jac(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(u)) += d;
      }
    }
    if (worst < 1e-14) break;
    const Eigen::MatrixXd jjt = jac * jac.transpose();
    const Eigen::VectorXd step = -jac.transpose() * jjt.ldlt().solve(r);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t u = j <= half ? j : n - 1 - j;
      h[j] += step(static_cast<Eigen::Index>(u));
    }
  }

  const double energy = std::sqrt(std::inner_product(h.begin(), h.end(), h.begin(), 0.0));
  for (auto& v : h) v /= energy;
  return h;
}

cvec convolve(std::span<const cd> x, std::span<const double> taps) {
  if (x.empty() || taps.empty()) return {};
  cvec y(x.size() + taps.size() - 1, cd{0.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == cd{0.0, 0.0}) continue;
    for (std::size_t j = 0; j < taps.size(); ++j) y[i + j] += x[i] * taps[j];
  }
  return y;
}

cvec upsample(std::span<const cd> symbols, std::size_t factor) {
  detail::require(factor >= 1, "upsampling factor must be >= 1");
  cvec out(symbols.size() * factor, cd{0.0, 0.0});
  for (std::size_t i = 0; i < symbols.size(); ++i) out[i * factor] = symbols[i];
  return out;
}

cvec shape_symbols(std::span<const cd> symbols, std::span<const double> taps, std::size_t samples_per_symbol) {
  const cvec up = upsample(symbols, samples_per_symbol);
  return convolve(up, taps);
}

cvec chirp_waveform(const ChirpSpec& spec) {
  detail::require(spec.length_samples > 0, "chirp length must be positive");
  cvec out(spec.length_samples);
  const double n_total = static_cast<double>(spec.length_samples);
  const double sweep = spec.target_frequency - spec.start_frequency;
  for (std::size_t n = 0; n < spec.length_samples; ++n) {
    const double t = static_cast<double>(n);
    const double phase = 2.0 * kPi * (spec.start_frequency * t + 0.5 * sweep * t * t / n_total);
    out[n] = std::polar(1.0, phase);
  }
  return out;
}

bitvec short_pn_sequence() {
  // Fibonacci LFSR, taps at stages 7 and 6, all-ones seed.
  std::uint8_t state = 0x7F;
  bitvec out(127);
  for (auto& b : out) {
    b = state & 1u;
    const std::uint8_t feedback = ((state >> 0) ^ (state >> 1)) & 1u;
    state = static_cast<std::uint8_t>((state >> 1) | (feedback << 6));
  }
  return out;
}

bitvec long_pn_sequence(std::size_t length, std::uint64_t seed) {
  Rng rng = make_stream(seed);
  return random_bits(length, rng);
}

cvec PreambleLayout::header() const {
  cvec out;
  out.reserve(header_symbols());
  const cvec s = bpsk_modulate(short_pn);
  const cvec l = bpsk_modulate(long_pn);
  for (int r = 0; r < 2; ++r) out.insert(out.end(), s.begin(), s.end());
  for (int r = 0; r < 2; ++r) out.insert(out.end(), l.begin(), l.end());
  return out;
}

PreambleLayout default_layout(const SrrcSpec& srrc, const ChirpSpec& chirp) {
  srrc.validate();
  PreambleLayout layout;
  layout.short_pn = short_pn_sequence();
  layout.long_pn = long_pn_sequence();
  layout.chirp = chirp;
  layout.samples_per_symbol = srrc.samples_per_symbol;
  layout.filter_length = srrc.tap_count();
  return layout;
}

std::size_t detect_packet_offset(std::span<const cd> rx, const ChirpSpec& chirp, const DetectionOptions& options) {
  const cvec tpl = chirp_waveform(chirp);
  const std::size_t len = tpl.size();
  if (rx.size() < len) throw NoPacketDetected("buffer shorter than the chirp template");

  std::size_t last = rx.size() - len;
  if (options.search_limit > 0) last = std::min(last, options.search_limit);

  double template_energy = 0.0;
  for (const auto& v : tpl) template_energy += std::norm(v);

  // Running window energy for the normalised peak test.
  double window_energy = 0.0;
  for (std::size_t n = 0; n < len; ++n) window_energy += std::norm(rx[n]);

  double best = -1.0;
  double best_energy = 0.0;
  std::size_t best_offset = 0;
  for (std::size_t o = 0; o <= last; ++o) {
    if (o > 0) window_energy += std::norm(rx[o + len - 1]) - std::norm(rx[o - 1]);
    cd acc{0.0, 0.0};
    for (std::size_t n = 0; n < len; ++n) acc += rx[o + n] * std::conj(tpl[n]);
    const double mag = std::abs(acc);
    if (mag > best) {
      best = mag;
      best_offset = o;
      best_energy = window_energy;
    }
  }

  const double denom = std::sqrt(template_energy * std::max(best_energy, 0.0));
  if (denom == 0.0 || best / denom < options.threshold) {
    throw NoPacketDetected("chirp correlation peak below detection threshold");
  }
  return best_offset;
}

double estimate_cfo(std::span<const cd> rx, const PreambleLayout& layout, double sample_rate_hz) {
  detail::require(sample_rate_hz > 0.0, "sample rate must be positive");
  const std::size_t chirp_len = layout.chirp.length_samples;
  const std::size_t ds = layout.short_period();
  const std::size_t dl = layout.long_period();
  const std::size_t skip = layout.filter_length - 1;
  detail::require(ds > skip && dl > skip, "preamble repeats shorter than the filter");
  if (rx.size() < chirp_len + 2 * ds + 2 * dl) throw InvalidFrame("buffer shorter than the preamble");

  const auto lag_sum = [&](std::size_t begin, std::size_t end, std::size_t lag) {
    cd acc{0.0, 0.0};
    for (std::size_t i = begin; i < end; ++i) acc += rx[i + lag] * std::conj(rx[i]);
    return acc;
  };

  const std::size_t short_start = chirp_len;
  const double coarse = std::arg(lag_sum(short_start + skip, short_start + ds, ds)) / static_cast<double>(ds);

  const std::size_t long_start = chirp_len + 2 * ds;
  const cd fine_acc = lag_sum(long_start + skip, long_start + dl, dl) *
                      std::polar(1.0, -coarse * static_cast<double>(dl));
  const double fine = std::arg(fine_acc) / static_cast<double>(dl);

  return (coarse + fine) * sample_rate_hz / (2.0 * kPi);
}

void apply_frequency_offset(std::span<cd> samples, double offset_hz, double sample_rate_hz, std::size_t first_index) {
  detail::require(sample_rate_hz > 0.0, "sample rate must be positive");
  const double w = 2.0 * kPi * offset_hz / sample_rate_hz;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    samples[n] *= std::polar(1.0, w * static_cast<double>(n + first_index));
  }
}

void add_awgn(std::span<cd> samples, double noise_variance, Rng& rng) {
  detail::require(noise_variance >= 0.0, "noise variance must be non-negative");
  if (noise_variance == 0.0) return;
  std::normal_distribution<double> n(0.0, std::sqrt(0.5 * noise_variance));
  for (auto& s : samples) s += cd{n(rng), n(rng)};
}

AlamoutiStreams alamouti_encode(std::span<const cd> symbols) {
  detail::require(symbols.size() % 2 == 0, "Alamouti encoding needs an even symbol count");
  AlamoutiStreams out;
  out.tx1.reserve(symbols.size());
  out.tx2.reserve(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); i += 2) {
    const cd s1 = symbols[i];
    const cd s2 = symbols[i + 1];
    out.tx1.push_back(s1);
    out.tx1.push_back(-std::conj(s2));
    out.tx2.push_back(s2);
    out.tx2.push_back(std::conj(s1));
  }
  return out;
}

AlamoutiFrame AlamoutiFrame::build(cvec pilot_tx1, cvec pilot_tx2, std::span<const cd> payload_symbols) {
  AlamoutiFrame f{std::move(pilot_tx1), std::move(pilot_tx2), alamouti_encode(payload_symbols)};
  f.validate();
  return f;
}

void AlamoutiFrame::validate() const {
  detail::require(!pilot_tx1.empty() && !pilot_tx2.empty(), "both antennas need a pilot block");
  detail::require(payload.tx1.size() == payload.tx2.size() && payload.tx1.size() % 2 == 0,
                  "payload streams must have equal, even length");
}

cvec AlamoutiFrame::stream_tx1() const {
  cvec out;
  out.reserve(pilot_length() + payload.tx1.size());
  out.insert(out.end(), pilot_tx1.begin(), pilot_tx1.end());
  out.insert(out.end(), pilot_tx2.size(), cd{0.0, 0.0});
  out.insert(out.end(), payload.tx1.begin(), payload.tx1.end());
  return out;
}

cvec AlamoutiFrame::stream_tx2() const {
  cvec out;
  out.reserve(pilot_length() + payload.tx2.size());
  out.insert(out.end(), pilot_tx1.size(), cd{0.0, 0.0});
  out.insert(out.end(), pilot_tx2.begin(), pilot_tx2.end());
  out.insert(out.end(), payload.tx2.begin(), payload.tx2.end());
  return out;
}

std::pair<cd, cd> estimate_channel_from_pilots(std::span<const cd> rx, const AlamoutiFrame& frame) {
  const std::size_t p1 = frame.pilot_tx1.size();
  const std::size_t p2 = frame.pilot_tx2.size();
  if (p1 == 0 || p2 == 0) throw InvalidFrame("empty pilot block");
  if (rx.size() < p1 + p2) throw InvalidFrame("received block shorter than the pilots");

  auto mean_ratio = [](std::span<const cd> r, std::span<const cd> pilot) {
    cd acc{0.0, 0.0};
    for (std::size_t i = 0; i < pilot.size(); ++i) {
      if (pilot[i] == cd{0.0, 0.0}) throw InvalidFrame("zero-valued pilot symbol");
      acc += r[i] / pilot[i];
    }
    return acc / static_cast<double>(pilot.size());
  };
  return {mean_ratio(rx.subspan(0, p1), frame.pilot_tx1), mean_ratio(rx.subspan(p1, p2), frame.pilot_tx2)};
}

cvec alamouti_combine(std::span<const cd> rx, cd h1, cd h2) {
  detail::require(rx.size() % 2 == 0, "Alamouti decoding needs received pairs");
  cvec out;
  out.reserve(rx.size());
  for (std::size_t i = 0; i < rx.size(); i += 2) {
    const cd r1 = rx[i];
    const cd r2 = rx[i + 1];
    out.push_back(std::conj(h1) * r1 + h2 * std::conj(r2));
    out.push_back(std::conj(h2) * r1 - h1 * std::conj(r2));
  }
  return out;
}

cvec alamouti_decode(std::span<const cd> rx, cd h1, cd h2) {
  cvec soft = alamouti_combine(rx, h1, h2);
  for (auto& s : soft) s = cd{s.real() >= 0.0 ? 1.0 : -1.0, 0.0};
  return soft;
}

double measure_ber(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits) {
  detail::require(tx_bits.size() == rx_bits.size(), "bit sequences must have equal length");
  detail::require(!tx_bits.empty(), "bit sequences must be non-empty");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < tx_bits.size(); ++i) errors += ((tx_bits[i] != 0) != (rx_bits[i] != 0)) ? 1 : 0;
  return static_cast<double>(errors) / static_cast<double>(tx_bits.size());
}

bitvec random_bits(std::size_t n, Rng& rng) {
  bitvec out(n);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 64 == 0) word = rng();
    out[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
  }
  return out;
}

}  // namespace uwmimo::dsp

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "uwmimo/random.hpp"

namespace uwmimo::dsp {

using cd = std::complex<double>;
using cvec = std::vector<cd>;
using bitvec = std::vector<std::uint8_t>;

// --- BPSK ---------------------------------------------------------------

/// bit 1 -> +1, bit 0 -> -1 on the real axis.
cvec bpsk_modulate(std::span<const std::uint8_t> bits);
/// Sign of the real part; zero maps to bit 1.
bitvec bpsk_demodulate(std::span<const cd> symbols);

// --- Pulse shaping ------------------------------------------------------

struct SrrcSpec {
  double symbol_duration_s = 1.3107e-3;
  double rolloff = 0.3;
  std::size_t samples_per_symbol = 4;
  std::size_t span_symbols = 8;

  void validate() const;
  std::size_t tap_count() const { return span_symbols * samples_per_symbol + 1; }
};

/// Symmetric, unit-energy square-root raised-cosine taps.
std::vector<double> srrc_taps(const SrrcSpec& spec);

/// Full linear convolution (length x + taps - 1).
cvec convolve(std::span<const cd> x, std::span<const double> taps);
/// Zero-stuffs `factor - 1` samples after every symbol.
cvec upsample(std::span<const cd> symbols, std::size_t factor);
/// upsample + convolve.
cvec shape_symbols(std::span<const cd> symbols, std::span<const double> taps, std::size_t samples_per_symbol);

// --- Preambles ------------------------------------------------------------

/// Linear up-chirp; frequencies in cycles per sample.
struct ChirpSpec {
  double start_frequency = 0.0;
  double target_frequency = 0.2;
  std::size_t length_samples = 500;
};

cvec chirp_waveform(const ChirpSpec& spec);

/// 127-bit maximal-length sequence from the x^7 + x^6 + 1 LFSR.
bitvec short_pn_sequence();
/// Fixed pseudorandom pattern; 1024 is not 2^n - 1, so no m-sequence exists.
bitvec long_pn_sequence(std::size_t length = 1024, std::uint64_t seed = 0x4C4F4E47504EULL);

struct PreambleLayout {
  bitvec short_pn;  ///< sent twice
  bitvec long_pn;   ///< sent twice
  ChirpSpec chirp;
  std::size_t samples_per_symbol = 4;
  std::size_t filter_length = 33;

  std::size_t short_period() const { return short_pn.size() * samples_per_symbol; }
  std::size_t long_period() const { return long_pn.size() * samples_per_symbol; }
  std::size_t header_symbols() const { return 2 * (short_pn.size() + long_pn.size()); }
  /// BPSK symbols of the two short and two long repeats, in order.
  cvec header() const;
};

PreambleLayout default_layout(const SrrcSpec& srrc, const ChirpSpec& chirp = {});

// --- Synchronisation ------------------------------------------------------

struct DetectionOptions {
  /// Minimum |corr| / (||chirp|| ||window||) at the peak.
  double threshold = 0.3;
  /// Highest offset searched; 0 searches the whole buffer.
  std::size_t search_limit = 0;
};

/// Offset maximizing |sum_n rx[o + n] conj(chirp[n])|. Throws NoPacketDetected
/// when the normalised peak is below the threshold or rx is too short.
std::size_t detect_packet_offset(std::span<const cd> rx, const ChirpSpec& chirp, const DetectionOptions& options = {});

/// Two-stage repeated-preamble estimator on an offset-aligned packet (rx[0]
/// is the first chirp sample). Coarse stage: angle of the lag-D_short
/// autocorrelation over the short repeats; fine stage: the same on the long
/// repeats after removing the coarse estimate. Each window skips the first
/// filter_length - 1 samples so both halves carry identical symbol history.
/// Offsets beyond +/- fs / (2 D_short) alias silently.
double estimate_cfo(std::span<const cd> rx, const PreambleLayout& layout, double sample_rate_hz);

/// x[n] * exp(j 2 pi f (n + first_index) / fs)
void apply_frequency_offset(std::span<cd> samples, double offset_hz, double sample_rate_hz,
                            std::size_t first_index = 0);

/// Adds circular complex Gaussian noise with total variance `noise_variance`.
void add_awgn(std::span<cd> samples, double noise_variance, Rng& rng);

// --- Alamouti -------------------------------------------------------------

struct AlamoutiStreams {
  cvec tx1;
  cvec tx2;
};

/// Per pair (s1, s2): tx1 sends [s1, -s2*], tx2 sends [s2, s1*].
AlamoutiStreams alamouti_encode(std::span<const cd> symbols);

/// Pilot block from tx1 while tx2 is silent, then the reverse, then the
/// encoded payload on both.
struct AlamoutiFrame {
  cvec pilot_tx1;
  cvec pilot_tx2;
  AlamoutiStreams payload;

  static AlamoutiFrame build(cvec pilot_tx1, cvec pilot_tx2, std::span<const cd> payload_symbols);
  void validate() const;
  cvec stream_tx1() const;
  cvec stream_tx2() const;
  std::size_t pilot_length() const { return pilot_tx1.size() + pilot_tx2.size(); }
};

/// Means of rx / pilot over each antenna's pilot slots. `rx` starts at the
/// first pilot symbol. Throws InvalidFrame on a zero pilot or short input.
std::pair<cd, cd> estimate_channel_from_pilots(std::span<const cd> rx, const AlamoutiFrame& frame);

/// Linear combining: s1 = h1* r1 + h2 r2*, s2 = h2* r1 - h1 r2*.
cvec alamouti_combine(std::span<const cd> rx, cd h1, cd h2);
/// Combining followed by ML slicing to the BPSK alphabet.
cvec alamouti_decode(std::span<const cd> rx, cd h1, cd h2);

/// Hamming distance / length.
double measure_ber(std::span<const std::uint8_t> tx_bits, std::span<const std::uint8_t> rx_bits);

bitvec random_bits(std::size_t n, Rng& rng);

}  // namespace uwmimo::dsp

#pragma once

#include <cstddef>
#include <span>

#include "uwmimo/baseband_dsp.hpp"

namespace uwmimo::dsp {

struct ModemConfig {
  SrrcSpec srrc;
  ChirpSpec chirp;
  double sample_rate_hz = 195312.5;
  std::size_t pilot_symbols = 64;
  std::uint64_t long_pn_seed = 0x4C4F4E47504EULL;
  DetectionOptions detection;
};

struct BeamformingReception {
  bitvec bits;
  std::size_t offset = 0;
  double cfo_hz = 0.0;
  cd gain{0.0, 0.0};  ///< composite channel estimated on the long PN repeats
};

struct AlamoutiReception {
  bitvec bits;
  std::size_t offset = 0;
  double cfo_hz = 0.0;
  cd h1{0.0, 0.0};
  cd h2{0.0, 0.0};
};

struct AlamoutiWaveforms {
  cvec tx1;  ///< chirp, preamble, pilot 1, silence, payload
  cvec tx2;  ///< silence through the preamble and pilot 1, pilot 2, payload
  AlamoutiFrame frame;
};

/// Sample-level transmitter/receiver pair built from the primitives in
/// baseband_dsp.hpp. Frames are [chirp | SRRC-shaped symbols]; the shaped
/// part starts with the short and long PN repeats.
class Modem {
 public:
  explicit Modem(ModemConfig config = {});

  const ModemConfig& config() const { return config_; }
  const PreambleLayout& layout() const { return layout_; }
  const std::vector<double>& taps() const { return taps_; }

  /// Waveform every beamforming transmitter sends (before its own phase
  /// pre-compensation).
  cvec beamforming_frame(std::span<const cd> payload_symbols) const;

  /// Two-antenna Alamouti waveforms with random BPSK pilots drawn from `rng`.
  AlamoutiWaveforms alamouti_frames(std::span<const cd> payload_symbols, Rng& rng) const;

  BeamformingReception receive_beamforming(std::span<const cd> rx, std::size_t payload_symbols) const;
  AlamoutiReception receive_alamouti(std::span<const cd> rx, const AlamoutiFrame& frame) const;

  /// Number of samples spanned by a frame carrying `shaped_symbols` symbols.
  std::size_t frame_length(std::size_t shaped_symbols) const;

 private:
  struct Front {
    std::size_t offset;
    double cfo_hz;
    cvec symbols;  ///< matched-filter output at every symbol instant
  };
  Front front_end(std::span<const cd> rx, std::size_t shaped_symbols) const;
  cvec modulate(std::span<const cd> shaped_symbols) const;

  ModemConfig config_;
  PreambleLayout layout_;
  std::vector<double> taps_;
  cvec chirp_;
  cvec header_;
};

/// Residual synchronization error of a slave transmitter: an integer sample
/// shift of round(time_error_s * fs) (positive delays) and the phase
/// 2 pi f_c eps_t + 2 pi eps_f (n / fs + eps_t). Returns the shift applied.
long apply_sync_error(cvec& samples, double time_error_s, double freq_error_hz, double carrier_hz,
                      double sample_rate_hz);

/// Sums `streams[i] * gains[i]` into one buffer with `lead` leading zeros and
/// `tail` trailing zeros; shorter streams are zero-padded.
cvec superpose(std::span<const cvec> streams, std::span<const cd> gains, std::size_t lead, std::size_t tail);

}  // namespace uwmimo::dsp

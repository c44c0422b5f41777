#include "uwmimo/baseband_chain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uwmimo/error.hpp"

namespace uwmimo::dsp {

Modem::Modem(ModemConfig config) : config_(std::move(config)) {
  config_.srrc.validate();
  detail::require(config_.sample_rate_hz > 0.0, "sample rate must be positive");
  detail::require(config_.pilot_symbols > 0, "pilot block must be non-empty");
  layout_ = default_layout(config_.srrc, config_.chirp);
  layout_.long_pn = long_pn_sequence(layout_.long_pn.size(), config_.long_pn_seed);
  taps_ = srrc_taps(config_.srrc);
  chirp_ = chirp_waveform(config_.chirp);
  header_ = layout_.header();
}

std::size_t Modem::frame_length(std::size_t shaped_symbols) const {
  return chirp_.size() + shaped_symbols * config_.srrc.samples_per_symbol + taps_.size() - 1;
}

cvec Modem::modulate(std::span<const cd> shaped_symbols) const {
  cvec out = chirp_;
  const cvec body = shape_symbols(shaped_symbols, taps_, config_.srrc.samples_per_symbol);
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

cvec Modem::beamforming_frame(std::span<const cd> payload_symbols) const {
  cvec symbols = header_;
  symbols.insert(symbols.end(), payload_symbols.begin(), payload_symbols.end());
  return modulate(symbols);
}

AlamoutiWaveforms Modem::alamouti_frames(std::span<const cd> payload_symbols, Rng& rng) const {
  const std::size_t p = config_.pilot_symbols;
  AlamoutiWaveforms out;
  out.frame = AlamoutiFrame::build(bpsk_modulate(random_bits(p, rng)), bpsk_modulate(random_bits(p, rng)),
                                   payload_symbols);

  cvec s1 = header_;
  const cvec a1 = out.frame.stream_tx1();
  s1.insert(s1.end(), a1.begin(), a1.end());
  out.tx1 = modulate(s1);

  cvec s2(header_.size(), cd{0.0, 0.0});
  const cvec a2 = out.frame.stream_tx2();
  s2.insert(s2.end(), a2.begin(), a2.end());
  const cvec body = shape_symbols(s2, taps_, config_.srrc.samples_per_symbol);
  out.tx2.assign(chirp_.size(), cd{0.0, 0.0});
  out.tx2.insert(out.tx2.end(), body.begin(), body.end());
  return out;
}

Modem::Front Modem::front_end(std::span<const cd> rx, std::size_t shaped_symbols) const {
  Front f{};
  const std::size_t coarse = detect_packet_offset(rx, config_.chirp, config_.detection);
  const std::size_t needed = frame_length(shaped_symbols);
  if (rx.size() < coarse + needed) throw InvalidFrame("received buffer ends before the frame");

  f.cfo_hz = estimate_cfo(rx.subspan(coarse, needed), layout_, config_.sample_rate_hz);

  // A frequency offset slides the chirp correlation peak by offset / sweep
  // rate samples; repeat the search near the coarse peak once it is removed.
  constexpr std::size_t guard = 8;
  const std::size_t begin = coarse > guard ? coarse - guard : 0;
  const std::size_t end = std::min(rx.size(), coarse + needed + guard);
  cvec corrected(rx.begin() + static_cast<std::ptrdiff_t>(begin), rx.begin() + static_cast<std::ptrdiff_t>(end));
  apply_frequency_offset(corrected, -f.cfo_hz, config_.sample_rate_hz);
  DetectionOptions fine = config_.detection;
  fine.search_limit = std::min(coarse - begin + guard, corrected.size() - chirp_.size());
  f.offset = begin + detect_packet_offset(corrected, config_.chirp, fine);
  if (f.offset + needed > end) throw InvalidFrame("received buffer ends before the frame");

  const auto first_sample = static_cast<std::ptrdiff_t>(f.offset - begin);
  const cvec aligned(corrected.begin() + first_sample,
                     corrected.begin() + first_sample + static_cast<std::ptrdiff_t>(needed));

  const cvec mf = convolve(aligned, taps_);
  const std::size_t sps = config_.srrc.samples_per_symbol;
  const std::size_t first = chirp_.size() + taps_.size() - 1;
  f.symbols.resize(shaped_symbols);
  for (std::size_t k = 0; k < shaped_symbols; ++k) f.symbols[k] = mf[first + k * sps];
  return f;
}

BeamformingReception Modem::receive_beamforming(std::span<const cd> rx, std::size_t payload_symbols) const {
  const std::size_t n_header = header_.size();
  Front f = front_end(rx, n_header + payload_symbols);

  // Composite gain from the long PN repeats; the short repeats border the
  // chirp and pick up its matched-filter tail.
  const std::size_t long_start = 2 * layout_.short_pn.size();
  cd gain{0.0, 0.0};
  for (std::size_t k = long_start; k < n_header; ++k) gain += f.symbols[k] / header_[k];
  gain /= static_cast<double>(n_header - long_start);

  BeamformingReception out;
  out.offset = f.offset;
  out.cfo_hz = f.cfo_hz;
  out.gain = gain;
  out.bits.resize(payload_symbols);
  for (std::size_t k = 0; k < payload_symbols; ++k) {
    out.bits[k] = (f.symbols[n_header + k] * std::conj(gain)).real() >= 0.0 ? 1 : 0;
  }
  return out;
}

AlamoutiReception Modem::receive_alamouti(std::span<const cd> rx, const AlamoutiFrame& frame) const {
  frame.validate();
  const std::size_t n_header = header_.size();
  const std::size_t pilots = frame.pilot_length();
  const std::size_t payload = frame.payload.tx1.size();
  Front f = front_end(rx, n_header + pilots + payload);

  const std::span<const cd> body(f.symbols.data() + n_header, pilots + payload);
  const auto [h1, h2] = estimate_channel_from_pilots(body.subspan(0, pilots), frame);

  AlamoutiReception out;
  out.offset = f.offset;
  out.cfo_hz = f.cfo_hz;
  out.h1 = h1;
  out.h2 = h2;
  out.bits = bpsk_demodulate(alamouti_decode(body.subspan(pilots), h1, h2));
  return out;
}

long apply_sync_error(cvec& samples, double time_error_s, double freq_error_hz, double carrier_hz,
                      double sample_rate_hz) {
  detail::require(sample_rate_hz > 0.0, "sample rate must be positive");
  detail::require(std::isfinite(time_error_s) && std::isfinite(freq_error_hz), "sync errors must be finite");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double base = two_pi * (carrier_hz * time_error_s + freq_error_hz * time_error_s);
  const double step = two_pi * freq_error_hz / sample_rate_hz;
  for (std::size_t n = 0; n < samples.size(); ++n) {
    samples[n] *= std::polar(1.0, std::fmod(base + step * static_cast<double>(n), two_pi));
  }

  const long shift = std::lround(time_error_s * sample_rate_hz);
  if (shift > 0) {
    samples.insert(samples.begin(), static_cast<std::size_t>(shift), cd{0.0, 0.0});
  } else if (shift < 0) {
    const auto drop = std::min(samples.size(), static_cast<std::size_t>(-shift));
    samples.erase(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  return shift;
}

cvec superpose(std::span<const cvec> streams, std::span<const cd> gains, std::size_t lead, std::size_t tail) {
  detail::require(streams.size() == gains.size(), "one gain per stream");
  std::size_t longest = 0;
  for (const auto& s : streams) longest = std::max(longest, s.size());
  cvec out(lead + longest + tail, cd{0.0, 0.0});
  for (std::size_t i = 0; i < streams.size(); ++i) {
    for (std::size_t n = 0; n < streams[i].size(); ++n) out[lead + n] += gains[i] * streams[i][n];
  }
  return out;
}

}  // namespace uwmimo::dsp

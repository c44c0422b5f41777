#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "uwmimo/baseband_chain.hpp"
#include "uwmimo/baseband_dsp.hpp"
#include "uwmimo/error.hpp"

using namespace uwmimo;
using namespace uwmimo::dsp;

namespace {

constexpr double kFs = 195312.5;

// Cascade of the taps with themselves, sampled every sps samples around the
// peak: largest |off-peak| / peak.
double cascade_isi(const std::vector<double>& taps, std::size_t sps) {
  const std::size_t n = taps.size();
  std::vector<double> c(2 * n - 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) c[i + j] += taps[i] * taps[j];
  }
  const std::size_t mid = n - 1;
  double worst = 0.0;
  for (std::size_t k = sps; k <= mid; k += sps) {
    worst = std::max({worst, std::abs(c[mid + k]), std::abs(c[mid - k])});
  }
  return worst / c[mid];
}

cvec embed(const cvec& x, std::size_t lead, std::size_t tail) {
  cvec out(lead, cd{0.0, 0.0});
  out.insert(out.end(), x.begin(), x.end());
  out.insert(out.end(), tail, cd{0.0, 0.0});
  return out;
}

double mean_power(const cvec& x) {
  double p = 0.0;
  for (const auto& v : x) p += std::norm(v);
  return p / static_cast<double>(x.size());
}

}  // namespace

TEST_CASE("BPSK") {
  const bitvec bits{1, 0, 1};
  const auto s = bpsk_modulate(bits);
  REQUIRE(s.size() == 3);
  CHECK(s[0] == cd{1.0, 0.0});
  CHECK(s[1] == cd{-1.0, 0.0});
  CHECK(bpsk_demodulate(s) == bits);
  const cvec tilted{{0.2, 0.9}, {-0.2, 0.9}, {0.0, -1.0}};
  CHECK(bpsk_demodulate(tilted) == bitvec{1, 0, 1});

  Rng rng = make_stream(2);
  const auto many = random_bits(10007, rng);
  CHECK(bpsk_demodulate(bpsk_modulate(many)) == many);
  const auto ones = std::count(many.begin(), many.end(), 1);
  CHECK(std::abs(static_cast<double>(ones) / 10007.0 - 0.5) < 0.02);
}

TEST_CASE("SRRC taps") {
  SUBCASE("default filter") {
    const SrrcSpec spec;
    const auto taps = srrc_taps(spec);
    REQUIRE(taps.size() == spec.tap_count());
    double energy = 0.0;
    for (double t : taps) energy += t * t;
    CHECK(std::abs(energy - 1.0) < 1e-9);
    const auto centre = taps.size() / 2;
    CHECK(std::max_element(taps.begin(), taps.end()) - taps.begin() == static_cast<std::ptrdiff_t>(centre));
    for (std::size_t i = 0; i < taps.size(); ++i) CHECK(taps[i] == taps[taps.size() - 1 - i]);
    CHECK(cascade_isi(taps, spec.samples_per_symbol) < 1e-3);
  }

  SUBCASE("Nyquist cascade across roll-offs, spans and oversampling") {
    for (double a : {0.0, 0.1, 0.3, 0.5, 0.8, 1.0}) {
      for (std::size_t span : {6u, 8u, 12u}) {
        for (std::size_t sps : {2u, 4u, 8u}) {
          SrrcSpec spec;
          spec.rolloff = a;
          spec.span_symbols = span;
          spec.samples_per_symbol = sps;
          const auto taps = srrc_taps(spec);
          double energy = 0.0;
          for (double t : taps) energy += t * t;
          CHECK(std::abs(energy - 1.0) < 1e-9);
          CHECK(cascade_isi(taps, sps) < 1e-3);
        }
      }
    }
  }

  SrrcSpec bad;
  bad.rolloff = 1.5;
  CHECK_THROWS_AS(srrc_taps(bad), std::invalid_argument);
  bad = SrrcSpec{};
  bad.samples_per_symbol = 1;
  CHECK_THROWS_AS(srrc_taps(bad), std::invalid_argument);
}

TEST_CASE("convolution and upsampling") {
  const cvec x{{1.0, 0.0}, {2.0, 1.0}};
  const std::vector<double> h{1.0, -1.0, 0.5};
  const auto y = convolve(x, h);
  REQUIRE(y.size() == 4);
  CHECK(y[0] == cd{1.0, 0.0});
  CHECK(y[1] == cd{1.0, 1.0});
  CHECK(y[2] == cd{-1.5, -1.0});
  CHECK(y[3] == cd{1.0, 0.5});

  const auto u = upsample(x, 3);
  REQUIRE(u.size() == 6);
  CHECK(u[0] == x[0]);
  CHECK(u[3] == x[1]);
  CHECK(u[1] == cd{0.0, 0.0});
}

TEST_CASE("preamble sequences") {
  const auto pn = short_pn_sequence();
  REQUIRE(pn.size() == 127);
  CHECK(std::count(pn.begin(), pn.end(), 1) == 64);

  // Maximal length: circular autocorrelation of +-1 is -1 at every nonzero lag.
  const auto s = bpsk_modulate(pn);
  for (std::size_t lag = 1; lag < 127; ++lag) {
    double acc = 0.0;
    for (std::size_t i = 0; i < 127; ++i) acc += s[i].real() * s[(i + lag) % 127].real();
    CHECK(acc == -1.0);
  }

  CHECK(long_pn_sequence().size() == 1024);
  CHECK(long_pn_sequence() == long_pn_sequence());
  CHECK(long_pn_sequence(1024, 1) != long_pn_sequence(1024, 2));

  const auto layout = default_layout(SrrcSpec{});
  const auto header = layout.header();
  REQUIRE(header.size() == layout.header_symbols());
  CHECK(header.size() == 2 * (127 + 1024));
  for (std::size_t i = 0; i < 127; ++i) CHECK(header[i] == header[i + 127]);
  for (std::size_t i = 0; i < 1024; ++i) CHECK(header[254 + i] == header[254 + 1024 + i]);
}

TEST_CASE("chirp") {
  const ChirpSpec spec;
  const auto c = chirp_waveform(spec);
  REQUIRE(c.size() == 500);
  for (const auto& v : c) CHECK(std::abs(v) == doctest::Approx(1.0).epsilon(1e-14));
  // Instantaneous frequency sweeps from 0 to 0.2 cycles per sample.
  const double f_first = std::arg(c[1] * std::conj(c[0])) / (2.0 * std::numbers::pi);
  const double f_last = std::arg(c[499] * std::conj(c[498])) / (2.0 * std::numbers::pi);
  CHECK(std::abs(f_first) < 1e-3);
  CHECK(std::abs(f_last - 0.2) < 1e-3);
}

TEST_CASE("packet detection") {
  const ChirpSpec spec;
  const auto chirp = chirp_waveform(spec);
  CHECK(detect_packet_offset(embed(chirp, 0, 100), spec) == 0);
  CHECK(detect_packet_offset(embed(chirp, 50, 100), spec) == 50);

  SUBCASE("shift equivariance") {
    Rng rng = make_stream(6);
    cvec base = embed(chirp, 37, 0);
    cvec junk(200);
    for (auto& v : junk) v = 0.05 * cd{std::normal_distribution<double>()(rng), 0.0};
    base.insert(base.end(), junk.begin(), junk.end());
    const auto o0 = detect_packet_offset(base, spec);
    for (std::size_t k = 0; k < 300; k += 7) {
      cvec shifted(k, cd{0.0, 0.0});
      shifted.insert(shifted.end(), base.begin(), base.end());
      CHECK(detect_packet_offset(shifted, spec) == o0 + k);
    }
  }

  SUBCASE("10 dB sample SNR") {
    Rng rng = make_stream(7);
    int hits = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      cvec rx = embed(chirp, 50, 200);
      add_awgn(rx, 0.1, rng);
      const auto o = detect_packet_offset(rx, spec);
      if (o >= 49 && o <= 51) ++hits;
    }
    CHECK(hits >= 990);
  }

  SUBCASE("noise only or short buffers are rejected") {
    Rng rng = make_stream(8);
    cvec noise(2000, cd{0.0, 0.0});
    add_awgn(noise, 1.0, rng);
    CHECK_THROWS_AS(detect_packet_offset(noise, spec), NoPacketDetected);
    CHECK_THROWS_AS(detect_packet_offset(cvec(100), spec), NoPacketDetected);
  }

  SUBCASE("search limit") {
    DetectionOptions opt;
    opt.search_limit = 20;
    cvec rx = embed(chirp, 10, 0);
    rx.insert(rx.end(), chirp.begin(), chirp.end());
    CHECK(detect_packet_offset(rx, spec, opt) == 10);
  }
}

TEST_CASE("CFO estimation") {
  const Modem modem;
  Rng rng = make_stream(9);
  const auto payload = bpsk_modulate(random_bits(64, rng));
  const auto frame = modem.beamforming_frame(payload);
  const double signal = mean_power(frame);
  const double symbol_rate = kFs / static_cast<double>(modem.config().srrc.samples_per_symbol);

  SUBCASE("zero offset") {
    CHECK(std::abs(estimate_cfo(frame, modem.layout(), kFs)) < 1e-3 * symbol_rate);
  }

  SUBCASE("100 Hz at 20 dB: median error, bias, closed loop") {
    std::vector<double> err;
    double sum = 0.0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
      cvec rx = frame;
      apply_frequency_offset(rx, 100.0, kFs);
      add_awgn(rx, signal / 100.0, rng);
      const double est = estimate_cfo(rx, modem.layout(), kFs);
      err.push_back(std::abs(est - 100.0));
      sum += est;
      if (i < 20) {
        apply_frequency_offset(rx, -est, kFs);
        const double residual = estimate_cfo(rx, modem.layout(), kFs);
        CHECK(std::abs(residual) < 1e-3 * symbol_rate);
      }
    }
    std::nth_element(err.begin(), err.begin() + trials / 2, err.end());
    CHECK(err[trials / 2] < 0.5);
    CHECK(std::abs(sum / trials - 100.0) < 1.0);
  }

  SUBCASE("unbiased at 30 dB over the coarse range") {
    for (double f : {-150.0, -40.0, 15.0, 150.0}) {
      double sum = 0.0;
      for (int i = 0; i < 200; ++i) {
        cvec rx = frame;
        apply_frequency_offset(rx, f, kFs);
        add_awgn(rx, signal / 1000.0, rng);
        sum += estimate_cfo(rx, modem.layout(), kFs);
      }
      CHECK(std::abs(sum / 200.0 - f) < 0.01 * std::abs(f));
    }
  }

  CHECK_THROWS_AS(estimate_cfo(cvec(1000), modem.layout(), kFs), InvalidFrame);
}

TEST_CASE("Alamouti coding") {
  const cvec pair{{1.0, 0.0}, {-1.0, 0.0}};
  const auto enc = alamouti_encode(pair);
  CHECK(enc.tx1 == cvec{{1.0, 0.0}, {1.0, 0.0}});
  CHECK(enc.tx2 == cvec{{-1.0, 0.0}, {1.0, 0.0}});
  const auto zero = alamouti_encode(cvec(4));
  for (const auto& v : zero.tx1) CHECK(v == cd{0.0, 0.0});
  CHECK_THROWS_AS(alamouti_encode(cvec(3)), std::invalid_argument);

  Rng rng = make_stream(10);
  std::normal_distribution<double> g(0.0, 1.0);

  SUBCASE("energy per pair is doubled") {
    for (int i = 0; i < 100; ++i) {
      const cvec s{{g(rng), g(rng)}, {g(rng), g(rng)}};
      const auto e = alamouti_encode(s);
      const double tx = std::norm(e.tx1[0]) + std::norm(e.tx1[1]) + std::norm(e.tx2[0]) + std::norm(e.tx2[1]);
      CHECK(tx == doctest::Approx(2.0 * (std::norm(s[0]) + std::norm(s[1]))).epsilon(1e-13));
    }
  }

  SUBCASE("noiseless loopback through fixed channels") {
    const auto bits = random_bits(2000, rng);
    const auto s = bpsk_modulate(bits);
    const auto e = alamouti_encode(s);
    for (const auto& [h1, h2] : {std::pair{cd{1.0, 0.0}, cd{1.0, 0.0}},
                                 std::pair{std::polar(0.8, std::numbers::pi / 4), cd{0.3, 0.0}},
                                 std::pair{cd{-0.01, 0.2}, cd{2.0, -3.0}}}) {
      cvec rx(s.size());
      for (std::size_t k = 0; k < s.size(); ++k) rx[k] = h1 * e.tx1[k] + h2 * e.tx2[k];
      CHECK(bpsk_demodulate(alamouti_decode(rx, h1, h2)) == bits);
    }
  }

  SUBCASE("frame layout and pilot estimation") {
    const auto p1 = bpsk_modulate(random_bits(64, rng));
    const auto p2 = bpsk_modulate(random_bits(64, rng));
    const auto payload = bpsk_modulate(random_bits(32, rng));
    const auto frame = AlamoutiFrame::build(p1, p2, payload);
    const auto s1 = frame.stream_tx1();
    const auto s2 = frame.stream_tx2();
    REQUIRE(s1.size() == 128 + 32);
    REQUIRE(s2.size() == s1.size());
    for (std::size_t k = 0; k < 64; ++k) {
      CHECK(s2[k] == cd{0.0, 0.0});
      CHECK(s1[64 + k] == cd{0.0, 0.0});
    }

    for (const auto& [h1, h2] : {std::pair{cd{1.0, 0.0}, cd{1.0, 0.0}},
                                 std::pair{std::polar(0.8, std::numbers::pi / 4), cd{0.3, 0.0}}}) {
      cvec rx(s1.size());
      for (std::size_t k = 0; k < rx.size(); ++k) rx[k] = h1 * s1[k] + h2 * s2[k];
      const auto [e1, e2] = estimate_channel_from_pilots(rx, frame);
      CHECK(std::abs(e1 - h1) < 1e-12);
      CHECK(std::abs(e2 - h2) < 1e-12);
    }

    // 20 dB pilot SNR, 64 pilots per antenna.
    const cd h1 = std::polar(0.8, 1.0);
    const cd h2{0.3, -0.2};
    double se1 = 0.0;
    double se2 = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      cvec rx(128);
      for (std::size_t k = 0; k < 128; ++k) rx[k] = h1 * s1[k] + h2 * s2[k];
      add_awgn(rx, 0.01, rng);
      const auto [e1, e2] = estimate_channel_from_pilots(rx, frame);
      se1 += std::norm(e1 - h1);
      se2 += std::norm(e2 - h2);
    }
    CHECK(std::sqrt(se1 / 1000) < 0.02);
    CHECK(std::sqrt(se2 / 1000) < 0.02);

    AlamoutiFrame broken = frame;
    broken.pilot_tx2[3] = cd{0.0, 0.0};
    CHECK_THROWS_AS(estimate_channel_from_pilots(cvec(160, cd{1.0, 0.0}), broken), InvalidFrame);
    CHECK_THROWS_AS(estimate_channel_from_pilots(cvec(10), frame), InvalidFrame);
  }

  SUBCASE("combining gain matches the diversity formula") {
    const cd h1{0.6, 0.3};
    const cd h2{-0.2, 0.5};
    const double gain = std::norm(h1) + std::norm(h2);
    const double nv = 0.05;
    const std::size_t n = 10000;
    const auto s = bpsk_modulate(random_bits(n, rng));
    const auto e = alamouti_encode(s);
    cvec rx(n);
    for (std::size_t k = 0; k < n; ++k) rx[k] = h1 * e.tx1[k] + h2 * e.tx2[k];
    add_awgn(rx, nv, rng);
    const auto z = alamouti_combine(rx, h1, h2);
    double noise = 0.0;
    for (std::size_t k = 0; k < n; ++k) noise += std::norm(z[k] - gain * s[k]);
    noise /= static_cast<double>(n);
    const double measured_db = 10.0 * std::log10(gain * gain / noise);
    const double expected_db = 10.0 * std::log10(gain / nv);
    CHECK(std::abs(measured_db - expected_db) < 0.2);
  }
}

TEST_CASE("BER measurement") {
  const bitvec a{1, 0, 1, 1};
  CHECK(measure_ber(a, a) == 0.0);
  CHECK(measure_ber(a, bitvec{0, 1, 0, 0}) == 1.0);
  bitvec x(1000, 0);
  bitvec y = x;
  y[417] = 1;
  CHECK(measure_ber(x, y) == doctest::Approx(0.001).epsilon(1e-15));
  CHECK_THROWS_AS(measure_ber(a, bitvec{1}), std::invalid_argument);
}

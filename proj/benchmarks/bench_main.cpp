#include <benchmark/benchmark.h>

#include <vector>

#include "uwmimo/acoustic_channel.hpp"
#include "uwmimo/baseband_chain.hpp"
#include "uwmimo/mimo_analysis.hpp"
#include "uwmimo/scenarios.hpp"

using namespace uwmimo;

static void BM_BesselJ0(benchmark::State& state) {
  double x = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(channel::bessel_j0(x));
    x = x > 50.0 ? 0.0 : x + 0.37;
  }
}
BENCHMARK(BM_BesselJ0);

static void BM_EnvelopeDensityBuild(benchmark::State& state) {
  const channel::MultipathChannel ch{{0.5, 0.35, 0.2}, {0.0, 0.0, 0.0}};
  for (auto _ : state) benchmark::DoNotOptimize(channel::EnvelopeDensity(ch).total_mass());
}
BENCHMARK(BM_EnvelopeDensityBuild)->Unit(benchmark::kMillisecond);

static void BM_SampleEnvelope(benchmark::State& state) {
  const channel::MultipathChannel ch{{0.5, 0.35, 0.2}, {0.0, 0.0, 0.0}};
  Rng rng = make_stream(1);
  for (auto _ : state) benchmark::DoNotOptimize(channel::sample_envelope(ch, 10e3, rng));
}
BENCHMARK(BM_SampleEnvelope);

static void BM_SrrcTaps(benchmark::State& state) {
  dsp::SrrcSpec spec;
  spec.span_symbols = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dsp::srrc_taps(spec));
}
BENCHMARK(BM_SrrcTaps)->Arg(8)->Arg(16);

static void BM_EffectiveTime(benchmark::State& state) {
  const scenario::ScenarioConfig c;
  const auto e = scenario::evaluate_deployment(c, static_cast<std::size_t>(state.range(0)), 0);
  mimo::ScanOptions scan;
  scan.t_step_s = c.scan_step_s;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mimo::effective_time(e.acoustic_states, c.link_budget(), mimo::Scheme::Beamforming, scan));
  }
}
BENCHMARK(BM_EffectiveTime)->Arg(5)->Arg(19);

static void BM_BeamformingFrame(benchmark::State& state) {
  const dsp::Modem modem;
  Rng rng = make_stream(2);
  const auto bits = dsp::random_bits(1024, rng);
  scenario::ModemTrial t;
  t.channel = {dsp::cd{0.4, 0.1}, dsp::cd{-0.2, 0.3}};
  t.noise_variance = 1e-3;
  t.cfo_hz = 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(scenario::beamforming_bit_errors(modem, t, bits, rng));
}
BENCHMARK(BM_BeamformingFrame)->Unit(benchmark::kMillisecond);

static void BM_AlamoutiFrame(benchmark::State& state) {
  const dsp::Modem modem;
  Rng rng = make_stream(3);
  const auto bits = dsp::random_bits(1024, rng);
  scenario::ModemTrial t;
  t.channel = {dsp::cd{0.4, 0.1}, dsp::cd{-0.2, 0.3}};
  t.noise_variance = 1e-3;
  t.cfo_hz = 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(scenario::alamouti_bit_errors(modem, t, bits, rng));
}
BENCHMARK(BM_AlamoutiFrame)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

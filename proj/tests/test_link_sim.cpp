#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "oracles.hpp"
#include "polarmc/io.hpp"
#include "polarmc/link_sim.hpp"

using namespace polarmc;

TEST_CASE("PRBS-7 has full period 127") {
  Lfsr reg;
  reg.taps = {7, 6};
  reg.state = 0x5a & 0x7f;
  const auto start = reg.state;
  // enumerate until the state returns; period of a primitive polynomial
  // register is 2^7 - 1
  int period = 0;
  do {
    reg.next_bit();
    ++period;
  } while (reg.state != start && period <= 200);
  REQUIRE(period == 127);

  // the emitted sequence repeats with the same period
  auto [block, reg2] = lfsr_next_block(Lfsr{{7, 6}, 0x11}, 2 * 127);
  for (int i = 0; i < 127; ++i) REQUIRE(block[i] == block[i + 127]);
  (void)reg2;
}

TEST_CASE("lfsr_next_block edge cases") {
  Lfsr reg;  // PRBS-31 default
  auto [empty, same] = lfsr_next_block(reg, 0);
  REQUIRE(empty.empty());
  REQUIRE(same.state == reg.state);

  auto [a, _1] = lfsr_next_block(reg, 64);
  auto [b, _2] = lfsr_next_block(reg, 64);
  REQUIRE(a == b);  // determinism for equal seeds

  Lfsr zero;
  zero.state = 0;
  REQUIRE_THROWS_AS(lfsr_next_block(zero, 4), std::invalid_argument);
}

TEST_CASE("awgn_llr algebra and noiseless limit") {
  // ebno = 10 log10(1/(2R)) makes sigma^2 exactly 1
  const double rate = 0.25;
  const double ebno = 10.0 * std::log10(1.0 / (2.0 * rate));
  const double sigma2 = 1.0 / (2.0 * rate * std::pow(10.0, ebno / 10.0));
  REQUIRE(sigma2 == Catch::Approx(1.0).epsilon(1e-12));

  BitVector x{0, 1, 0, 1, 1, 0, 0, 1};
  NormalSampler quiet(5);
  const auto llr = awgn_llr(x, 60.0, 0.5, quiet);  // effectively noiseless
  for (std::size_t i = 0; i < x.size(); ++i) REQUIRE((llr[i] > 0) == (x[i] == 0));
}

TEST_CASE("awgn_llr empirical mean matches 2/sigma^2 at sigma^2 = 1") {
  const double rate = 0.5;
  const double ebno = 10.0 * std::log10(1.0 / (2.0 * rate));  // sigma^2 = 1
  const int n = 1000000;
  BitVector zeros(1024, 0);
  NormalSampler noise(424242);
  double sum = 0.0;
  for (int f = 0; f < n / 1024; ++f) {
    const auto llr = awgn_llr(zeros, ebno, rate, noise);
    for (double v : llr) sum += v;
  }
  const double mean = sum / ((n / 1024) * 1024);
  REQUIRE(mean == Catch::Approx(2.0).margin(0.01));
}

TEST_CASE("normal sampler moments over 1e6 draws") {
  NormalSampler noise(777);
  const int n = 1000000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = noise.next();
    s1 += g;
    s2 += g * g;
  }
  const double mean = s1 / n;
  const double var = s2 / n - mean * mean;
  // 5 sigma standard-error bounds: se(mean) = 1/sqrt(n), se(var) ~ sqrt(2/n)
  REQUIRE(std::fabs(mean) <= 5.0 / std::sqrt(double(n)));
  REQUIRE(std::fabs(var - 1.0) <= 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("run_point at +40 dB sees no errors") {
  SimConfig cfg;
  cfg.code = construct_code(6, 40, 4.0);
  cfg.stop.max_frames = 100;
  cfg.stop.min_frame_errors = 1;
  const auto stats = run_point(cfg, 40.0);
  REQUIRE(stats.frames == 100);
  REQUIRE(stats.frame_errors == 0);
  REQUIRE(stats.fer() == 0.0);
  REQUIRE(stats.bits == 100u * 40u);
}

TEST_CASE("loop closure: 1e4 quantized frames at +40 dB decode without error") {
  SimConfig cfg;
  cfg.code = construct_code(8, 180, 4.0);
  cfg.decoder = DecoderVariant::quantized;
  cfg.stop.max_frames = 10000;
  cfg.stop.min_frame_errors = 1;
  const auto stats = run_point(cfg, 40.0);
  REQUIRE(stats.frames == 10000);
  REQUIRE(stats.frame_errors == 0);
}

TEST_CASE("run_point is reproducible and independent of the worker count") {
  SimConfig cfg;
  cfg.code = construct_code(7, 80, 4.0);
  cfg.seed = 2718;
  cfg.stop.min_frame_errors = 25;
  cfg.stop.max_frames = 20000;

  cfg.threads = 1;
  const auto a = run_point(cfg, 3.0);
  const auto b = run_point(cfg, 3.0);
  cfg.threads = 4;
  const auto c = run_point(cfg, 3.0);

  REQUIRE(a.frames == b.frames);
  REQUIRE(a.frame_errors == b.frame_errors);
  REQUIRE(a.bit_errors == b.bit_errors);
  REQUIRE(a.frames == c.frames);
  REQUIRE(a.frame_errors == c.frame_errors);
  REQUIRE(a.bit_errors == c.bit_errors);
}

TEST_CASE("run_point FER matches an independent chain reimplementation within 2 sigma") {
  // library chain
  SimConfig cfg;
  cfg.code = construct_code(10, 854, 6.0);
  cfg.decoder = DecoderVariant::float_sc;
  cfg.seed = 1001;
  cfg.stop.min_frame_errors = 200;
  cfg.stop.max_frames = 4000;
  const double ebno = 5.0;
  const auto lib = run_point(cfg, ebno);

  // oracle chain: Kronecker matrix encoder + plain recursive SC + its own
  // noise stream
  const auto g = oracles::kron_generator(10);
  std::mt19937_64 rng(555001);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma2 = 1.0 / (2.0 * cfg.code.rate() * std::pow(10.0, ebno / 10.0));
  const double sigma = std::sqrt(sigma2);
  std::uint64_t frames = 0, errors = 0;
  while (errors < 200 && frames < 4000) {
    BitVector u(1024, 0);
    BitVector d(854);
    for (auto& b : d) b = rng() & 1;
    // systematic oracle encoding: embed, transform, zero frozen, transform
    int j = 0;
    for (int i = 0; i < 1024; ++i) u[i] = cfg.code.frozen[i] ? 0 : d[j++];
    u = oracles::matrix_encode(g, u);
    for (int i = 0; i < 1024; ++i)
      if (cfg.code.frozen[i]) u[i] = 0;
    const auto x = oracles::matrix_encode(g, u);
    LlrVector llr(1024);
    for (int i = 0; i < 1024; ++i)
      llr[i] = ((x[i] ? -1.0 : 1.0) + sigma * gauss(rng)) * 2.0 / sigma2;
    errors += (oracles::sc_decode(cfg.code, llr) != d);
    ++frames;
  }
  const double oracle_fer = static_cast<double>(errors) / frames;

  const double p = lib.fer();
  const double se = std::sqrt(p * (1 - p) / lib.frames + oracle_fer * (1 - oracle_fer) / frames);
  INFO("lib fer = " << p << " oracle fer = " << oracle_fer << " se = " << se);
  REQUIRE(std::fabs(p - oracle_fer) <= 2.0 * se + 1e-9);
}

TEST_CASE("run_sweep emits ascending points with plausible statistics") {
  SimConfig cfg;
  cfg.code = construct_code(6, 32, 3.0);
  cfg.ebno_db = {1.0, 2.0, 3.0, 4.0};
  cfg.seed = 31;
  cfg.stop.min_frame_errors = 60;
  cfg.stop.max_frames = 30000;
  const auto points = run_sweep(cfg);
  REQUIRE(points.size() == 4);

  // statistical monotonicity: each step down in noise should not raise FER
  // beyond the joint 2 sigma band
  for (std::size_t i = 1; i < points.size(); ++i) {
    const auto& a = points[i - 1];
    const auto& b = points[i];
    const double se = std::sqrt(a.fer() * (1 - a.fer()) / a.frames +
                                b.fer() * (1 - b.fer()) / b.frames);
    REQUIRE(b.fer() <= a.fer() + 2.0 * se + 1e-9);
  }
  for (const auto& p : points) {
    REQUIRE(p.fer() >= 0.0);
    REQUIRE(p.fer() <= 1.0);
    const auto ci = wilson_interval(p.frame_errors, p.frames);
    REQUIRE(ci.first <= p.fer());
    REQUIRE(p.fer() <= ci.second);
  }
}

TEST_CASE("run_sweep rejects bad Eb/No lists") {
  SimConfig cfg;
  cfg.code = construct_code(4, 8);
  cfg.ebno_db = {};
  REQUIRE_THROWS_AS(run_sweep(cfg), std::invalid_argument);
  cfg.ebno_db = {3.0, 2.0};
  REQUIRE_THROWS_AS(run_sweep(cfg), std::invalid_argument);
}

TEST_CASE("uncoded BPSK BER column matches the quadrature oracle") {
  for (double ebno : {0.0, 4.0, 8.0, 9.6}) {
    const double analytic = uncoded_bpsk_ber(ebno);
    const double oracle = oracles::q_function_quadrature(
        std::sqrt(2.0 * std::pow(10.0, ebno / 10.0)));
    REQUIRE(analytic == Catch::Approx(oracle).epsilon(1e-6));
  }
  // the 9.6 dB point sits near 1e-5
  REQUIRE(uncoded_bpsk_ber(9.6) > 0.8e-5);
  REQUIRE(uncoded_bpsk_ber(9.6) < 1.1e-5);
}

TEST_CASE("sweep CSV has the exact column set and is byte-stable") {
  SimConfig cfg;
  cfg.code = construct_code(5, 16, 3.0);
  cfg.ebno_db = {2.0, 3.0};
  cfg.seed = 7;
  cfg.stop.min_frame_errors = 20;
  cfg.stop.max_frames = 4000;
  const auto a = sweep_csv(run_sweep(cfg));
  const auto b = sweep_csv(run_sweep(cfg));
  REQUIRE(a == b);
  REQUIRE(a.rfind("ebno_db,frames,frame_errors,bit_errors,fer,ber,fer_ci_lo,fer_ci_hi,uncoded_ber\n",
                  0) == 0);

  cfg.threads = 3;
  REQUIRE(sweep_csv(run_sweep(cfg)) == a);
}

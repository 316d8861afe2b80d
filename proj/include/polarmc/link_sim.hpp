#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "polarmc/polar_code.hpp"
#include "polarmc/quant.hpp"
#include "polarmc/sc_decoder.hpp"

namespace polarmc {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Order-free combination of two seeds; used to derive per-point and
/// per-frame streams from the master seed.
inline std::uint64_t mix_seeds(std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(a) ^ b);
}

/// Fibonacci LFSR; default taps realize PRBS-31 (x^31 + x^28 + 1),
/// period 2^31 - 1. The state must stay nonzero.
struct Lfsr {
  std::vector<int> taps{31, 28};
  std::uint64_t state = 1;

  int degree() const {
    int d = 0;
    for (int t : taps) d = std::max(d, t);
    return d;
  }

  std::uint64_t mask() const { return (degree() >= 64) ? ~0ull : ((1ull << degree()) - 1); }

  void validate() const {
    if (taps.empty()) throw std::invalid_argument("Lfsr: taps must be non-empty");
    for (int t : taps)
      if (t < 1 || t > 63) throw std::invalid_argument("Lfsr: tap positions must be in [1, 63]");
    if ((state & mask()) == 0) throw std::invalid_argument("Lfsr: state must be nonzero");
  }

  int next_bit() {
    int fb = 0;
    for (int t : taps) fb ^= static_cast<int>((state >> (t - 1)) & 1ull);
    state = ((state << 1) | static_cast<std::uint64_t>(fb)) & mask();
    return fb;
  }
};

/// Emits k bits and the advanced register state.
inline std::pair<BitVector, Lfsr> lfsr_next_block(Lfsr reg, int k) {
  if (k < 0) throw std::invalid_argument("lfsr_next_block: k must be >= 0");
  reg.validate();
  BitVector out(k);
  for (int i = 0; i < k; ++i) out[i] = static_cast<std::uint8_t>(reg.next_bit());
  return {std::move(out), reg};
}

/// Marsaglia polar gaussian on top of mt19937_64; implementation-pinned so
/// results do not depend on the standard library's distributions.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double next() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform_pm1();
      v = uniform_pm1();
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  double uniform_pm1() {
    return static_cast<double>(rng_()) * (1.0 / 9223372036854775808.0) - 1.0;  // [-1, 1)
  }

  std::mt19937_64 rng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// BPSK over AWGN: bit 0 -> +1, bit 1 -> -1, sigma^2 = 1/(2 R 10^(EbNo/10)),
/// LLR = 2 y / sigma^2.
inline LlrVector awgn_llr(const BitVector& x, double ebno_db, double rate, NormalSampler& noise) {
  if (!(rate > 0.0) || rate > 1.0) throw std::invalid_argument("awgn_llr: rate must be in (0, 1]");
  const double sigma2 = 1.0 / (2.0 * rate * std::pow(10.0, ebno_db / 10.0));
  const double sigma = std::sqrt(sigma2);
  const double scale = 2.0 / sigma2;
  LlrVector llr(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double sym = x[i] ? -1.0 : 1.0;
    llr[i] = (sym + sigma * noise.next()) * scale;
  }
  return llr;
}

enum class DecoderVariant { float_sc, float_fast, quantized };

struct StopRule {
  std::uint64_t min_frame_errors = 100;
  std::uint64_t max_frames = 100000000ull;
};

struct LfsrConfig {
  std::vector<int> taps{31, 28};
  std::uint64_t seed = 1;
};

struct SimConfig {
  PolarCode code;
  std::vector<double> ebno_db;
  DecoderVariant decoder = DecoderVariant::float_fast;
  std::optional<QuantSchedule> schedule;  // quantized variant; defaults from the code
  ShortcutCaps caps;
  std::uint64_t seed = 1;
  StopRule stop;
  LfsrConfig lfsr;
  int threads = 0;  // <= 0: hardware concurrency

  void validate() const {
    code.validate();
    if (stop.min_frame_errors < 1) throw std::invalid_argument("SimConfig: min_frame_errors must be >= 1");
    if (stop.max_frames < 1) throw std::invalid_argument("SimConfig: max_frames must be >= 1");
    Lfsr probe{lfsr.taps, lfsr.seed};
    probe.validate();
  }
};

struct ErrorStats {
  double ebno_db = 0.0;
  std::uint64_t frames = 0;
  std::uint64_t frame_errors = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits = 0;
  double elapsed_s = 0.0;

  double fer() const { return frames ? static_cast<double>(frame_errors) / frames : 0.0; }
  double ber() const { return bits ? static_cast<double>(bit_errors) / bits : 0.0; }
};

/// Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                                 double z = 1.96) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Uncoded BPSK bit error rate Q(sqrt(2 Eb/No)) = erfc(sqrt(Eb/No)) / 2.
inline double uncoded_bpsk_ber(double ebno_db) {
  return 0.5 * std::erfc(std::sqrt(std::pow(10.0, ebno_db / 10.0)));
}

namespace detail {

/// One frame of the source -> encoder -> channel -> decoder chain; all
/// randomness derives from the frame key, so results are independent of
/// scheduling.
template <class Decode>
inline std::uint32_t simulate_one_frame(const SimConfig& cfg, double ebno_db,
                                        std::uint64_t point_seed, std::uint64_t frame_index,
                                        Decode&& decode) {
  const std::uint64_t fkey = mix_seeds(point_seed, frame_index);

  Lfsr reg{cfg.lfsr.taps, 0};
  reg.state = mix_seeds(cfg.lfsr.seed, fkey) & reg.mask();
  if (reg.state == 0) reg.state = 1;
  BitVector data(cfg.code.info_length);
  for (auto& b : data) b = static_cast<std::uint8_t>(reg.next_bit());

  const BitVector cw = encode_systematic(cfg.code, data);
  NormalSampler noise(mix_seeds(fkey, 0x6e6f697365ull));
  const LlrVector llr = awgn_llr(cw, ebno_db, cfg.code.rate(), noise);

  const BitVector decided = decode(llr);
  std::uint32_t nerr = 0;
  for (int i = 0; i < cfg.code.info_length; ++i) nerr += (decided[i] != data[i]);
  return nerr;
}

}  // namespace detail

/// Monte-Carlo run at one Eb/No until the stop rule fires. Frames are
/// processed in batches; workers fill per-frame results that are folded in
/// frame-index order, so the outcome is byte-identical for any thread count.
inline ErrorStats run_point(const SimConfig& cfg, double ebno_db) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<SegmentNode> segments =
      (cfg.decoder == DecoderVariant::float_sc)
          ? detect_shortcuts(cfg.code, ShortcutCaps::leaf_only())
          : detect_shortcuts(cfg.code, cfg.caps);
  QuantSchedule sched;
  if (cfg.decoder == DecoderVariant::quantized) {
    sched = cfg.schedule ? *cfg.schedule : default_schedule(cfg.code);
    sched.validate(cfg.code.n);
  }

  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;

  const std::uint64_t point_seed = cfg.seed;
  ErrorStats stats;
  stats.ebno_db = ebno_db;

  const std::uint64_t batch = std::max<std::uint64_t>(512, static_cast<std::uint64_t>(threads) * 256);
  std::vector<std::uint32_t> results;
  std::uint64_t frame_base = 0;
  bool done = false;

  while (!done && stats.frames < cfg.stop.max_frames && stats.frame_errors < cfg.stop.min_frame_errors) {
    const std::uint64_t m = std::min<std::uint64_t>(batch, cfg.stop.max_frames - stats.frames);
    results.assign(m, 0);

    // each thread owns one decoder and pulls chunks of frame indices
    auto range_runner = [&](auto& decode, std::uint64_t lo, std::uint64_t hi) {
      for (std::uint64_t i = lo; i < hi; ++i)
        results[i] = detail::simulate_one_frame(cfg, ebno_db, point_seed, frame_base + i, decode);
    };
    auto thread_body = [&](auto next_range) {
      if (cfg.decoder == DecoderVariant::quantized) {
        ScQuantDecoder dec(cfg.code, segments, sched);
        const QFormat chan_fmt = sched.format_at(0);
        auto decode = [&](const LlrVector& llr) { return dec.decode(quantize_frame(llr, chan_fmt)); };
        for (auto r = next_range(); r.first < r.second; r = next_range()) range_runner(decode, r.first, r.second);
      } else {
        ScDecoder dec(cfg.code, segments);
        auto decode = [&](const LlrVector& llr) { return dec.decode(llr); };
        for (auto r = next_range(); r.first < r.second; r = next_range()) range_runner(decode, r.first, r.second);
      }
    };

    if (threads == 1 || m < 64) {
      bool taken = false;
      thread_body([&]() -> std::pair<std::uint64_t, std::uint64_t> {
        if (taken) return {m, m};
        taken = true;
        return {0, m};
      });
    } else {
      std::atomic<std::uint64_t> next{0};
      const std::uint64_t chunk = 16;
      std::vector<std::thread> pool;
      pool.reserve(threads);
      for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
          thread_body([&]() -> std::pair<std::uint64_t, std::uint64_t> {
            const std::uint64_t lo = next.fetch_add(chunk);
            return {std::min(lo, m), std::min(lo + chunk, m)};
          });
        });
      for (auto& th : pool) th.join();
    }

    // fold in frame order; the stop rule fires at a worker-count-independent frame
    for (std::uint64_t i = 0; i < m; ++i) {
      stats.frames += 1;
      stats.bits += cfg.code.info_length;
      if (results[i] > 0) {
        stats.frame_errors += 1;
        stats.bit_errors += results[i];
      }
      if (stats.frame_errors >= cfg.stop.min_frame_errors) {
        done = true;
        break;
      }
    }
    frame_base += m;
  }

  stats.elapsed_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return stats;
}

/// Runs every Eb/No point with an independent seed derived from the master
/// seed. The list must be ascending.
inline std::vector<ErrorStats> run_sweep(const SimConfig& cfg) {
  cfg.validate();
  if (cfg.ebno_db.empty()) throw std::invalid_argument("run_sweep: ebno list must be non-empty");
  for (std::size_t i = 1; i < cfg.ebno_db.size(); ++i)
    if (!(cfg.ebno_db[i] > cfg.ebno_db[i - 1]))
      throw std::invalid_argument("run_sweep: ebno list must be strictly ascending");

  std::vector<ErrorStats> out;
  out.reserve(cfg.ebno_db.size());
  for (std::size_t i = 0; i < cfg.ebno_db.size(); ++i) {
    SimConfig point_cfg = cfg;
    point_cfg.seed = mix_seeds(cfg.seed, 0xBEEF0000ull + i);
    out.push_back(run_point(point_cfg, cfg.ebno_db[i]));
  }
  return out;
}

}  // namespace polarmc

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "polarmc/errors.hpp"
#include "polarmc/polar_code.hpp"
#include "polarmc/sc_decoder.hpp"

namespace polarmc {

/// Sign-magnitude fixed-point layout: one sign bit plus total_bits-1
/// magnitude bits on a uniform grid of `step` LLR units per LSB.
/// total_bits == 1 carries the sign only (magnitude always zero).
struct QFormat {
  int total_bits = 5;
  double step = 1.0;

  int max_mag() const { return (1 << (total_bits - 1)) - 1; }

  void validate() const {
    if (total_bits < 1 || total_bits > 8)
      throw std::invalid_argument("QFormat: total_bits must be in [1, 8]");
    if (!(step > 0.0)) throw std::invalid_argument("QFormat: step must be positive");
  }
};

struct QLlr {
  bool negative = false;
  std::uint8_t mag = 0;
};

struct QuantStats {
  std::uint64_t saturations = 0;
};

/// Nearest-grid quantization, ties away from zero, silent saturation at the
/// format's maximum magnitude. The sign of a true zero is +; a negative
/// value that rounds to magnitude zero keeps its sign.
inline QLlr quantize(double x, const QFormat& fmt, QuantStats* stats = nullptr) {
  long long m = std::llround(std::fabs(x) / fmt.step);
  const int max_mag = fmt.max_mag();
  if (m > max_mag) {
    m = max_mag;
    if (stats) ++stats->saturations;
  }
  return QLlr{x < 0.0, static_cast<std::uint8_t>(m)};
}

inline double dequantize(QLlr v, const QFormat& fmt) {
  const double mag = static_cast<double>(v.mag) * fmt.step;
  return v.negative ? -mag : mag;
}

namespace detail {

inline QLlr q_clip(bool negative, long long mag, const QFormat& out_fmt, QuantStats* stats) {
  if (mag == 0) negative = false;  // computed zeros normalize to +
  const int max_mag = out_fmt.max_mag();
  if (mag > max_mag) {
    // saturation keeps the sign; sign-only (1-bit) stages stay meaningful
    mag = max_mag;
    if (stats) ++stats->saturations;
  }
  return QLlr{negative, static_cast<std::uint8_t>(mag)};
}

}  // namespace detail

/// Min-sum on magnitudes, XOR on signs, clipped into out_fmt (shared step
/// grid across stages, width clipping only).
inline QLlr q_f_kernel(QLlr a, QLlr b, const QFormat& out_fmt, QuantStats* stats = nullptr) {
  const int mag = a.mag < b.mag ? a.mag : b.mag;
  return detail::q_clip(a.negative != b.negative, mag, out_fmt, stats);
}

/// b + (1-2z)*a on the shared grid, saturating into out_fmt.
inline QLlr q_g_kernel(QLlr a, QLlr b, int z, const QFormat& out_fmt, QuantStats* stats = nullptr) {
  const int va = a.negative ? -static_cast<int>(a.mag) : a.mag;
  const int vb = b.negative ? -static_cast<int>(b.mag) : b.mag;
  const int r = vb + (z ? -va : va);
  return detail::q_clip(r < 0, r < 0 ? -r : r, out_fmt, stats);
}

/// Per-recursion-depth bit widths on one shared step grid. Depth 0 is the
/// channel; depths 1..n are the decoder's internal stages.
struct QuantSchedule {
  int channel_bits = 5;
  double step = 1.0;
  std::vector<int> per_depth_bits;  // depths 1..n

  QFormat format_at(int depth) const {
    if (depth == 0) return QFormat{channel_bits, step};
    return QFormat{per_depth_bits[depth - 1], step};
  }

  void validate(int n) const {
    if (static_cast<int>(per_depth_bits.size()) != n)
      throw config_error("QuantSchedule: expected " + std::to_string(n) +
                         " internal depths, got " + std::to_string(per_depth_bits.size()));
    QFormat{channel_bits, step}.validate();
    for (int b : per_depth_bits)
      if (b < 1 || b > 8) throw config_error("QuantSchedule: depth width out of [1, 8]");
  }
};

/// Channel step so that mean + 3 sigma of the LLR magnitude at the design
/// Eb/No spans the channel format: step = (2/s^2 + 6/s) / max_mag with
/// s^2 = 1 / (2 R 10^(snr/10)).
inline double channel_step_for(double design_snr_db, double rate, int channel_bits) {
  const double sigma2 = 1.0 / (2.0 * rate * std::pow(10.0, design_snr_db / 10.0));
  const double sigma = std::sqrt(sigma2);
  const double max_llr = 2.0 / sigma2 + 6.0 / sigma;
  return max_llr / QFormat{channel_bits, 1.0}.max_mag();
}

/// Width decays with polarization depth: 5,5,5,5,4,4,4,4,3,3 for n = 10.
/// On the shared step grid, widths below 3 bits cost several tenths of a dB,
/// so the decay floors at 3; narrower tails remain expressible as explicit
/// schedules.
inline QuantSchedule default_schedule(const PolarCode& code) {
  QuantSchedule s;
  s.channel_bits = 5;
  s.step = channel_step_for(code.design_snr_db, code.rate(), s.channel_bits);
  s.per_depth_bits.resize(code.n);
  const int mid = (2 * code.n + 4) / 5;   // ceil(0.4 n)
  const int late = (4 * code.n + 4) / 5;  // ceil(0.8 n)
  for (int d = 1; d <= code.n; ++d)
    s.per_depth_bits[d - 1] = d <= mid ? 5 : (d <= late ? 4 : 3);
  return s;
}

inline std::vector<QLlr> quantize_frame(const LlrVector& llr, const QFormat& fmt,
                                        QuantStats* stats = nullptr) {
  std::vector<QLlr> out(llr.size());
  for (std::size_t i = 0; i < llr.size(); ++i) out[i] = quantize(llr[i], fmt, stats);
  return out;
}

namespace detail {

struct quant_ops {
  using value_type = QLlr;
  const QuantSchedule* sched = nullptr;
  QuantStats* stats = nullptr;

  QLlr f(QLlr a, QLlr b, int depth) const {
    return q_f_kernel(a, b, sched->format_at(depth), stats);
  }
  QLlr g(QLlr a, QLlr b, std::uint8_t z, int depth) const {
    return q_g_kernel(a, b, z, sched->format_at(depth), stats);
  }
  static bool decide(QLlr v) { return v.negative; }

  bool rep_decide(const QLlr* v, int len, int /*depth*/) const {
    long long sum = 0;  // widened accumulator
    for (int i = 0; i < len; ++i) sum += v[i].negative ? -static_cast<long long>(v[i].mag) : v[i].mag;
    return sum < 0;
  }

  static int min_abs_index(const QLlr* v, int len) {
    int best = 0;
    for (int i = 1; i < len; ++i)
      if (v[i].mag < v[best].mag) best = i;
    return best;
  }
};

}  // namespace detail

/// Reusable quantized SC decoder with the decode_fast decision structure and
/// per-depth storage formats.
class ScQuantDecoder {
 public:
  ScQuantDecoder(const PolarCode& code, std::vector<SegmentNode> segments, QuantSchedule schedule)
      : engine_(code, std::move(segments)), schedule_(std::move(schedule)) {
    schedule_.validate(code.n);
  }

  const QuantSchedule& schedule() const { return schedule_; }

  BitVector decode(const std::vector<QLlr>& qllr, QuantStats* stats = nullptr) {
    detail::quant_ops ops{&schedule_, stats};
    return engine_.decode(ops, qllr.data(), static_cast<int>(qllr.size()));
  }

 private:
  detail::sc_engine<detail::quant_ops> engine_;
  QuantSchedule schedule_;
};

inline BitVector decode_sc_quantized(const PolarCode& code, const std::vector<QLlr>& qllr,
                                     const QuantSchedule& schedule,
                                     const std::vector<SegmentNode>& shortcuts,
                                     QuantStats* stats = nullptr) {
  ScQuantDecoder dec(code, shortcuts, schedule);
  return dec.decode(qllr, stats);
}

}  // namespace polarmc

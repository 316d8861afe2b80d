#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <vector>

#include "polarmc/polar_code.hpp"

namespace polarmc {

/// Soft channel values in the natural-log LLR domain; positive favors bit 0.
using LlrVector = std::vector<double>;

/// Min-sum F combiner: sign(a)*sign(b)*min(|a|,|b|), sign(0) treated as +1.
inline double f_kernel(double a, double b) {
  const double mag = std::fmin(std::fabs(a), std::fabs(b));
  return ((a < 0.0) != (b < 0.0)) ? -mag : mag;
}

/// G combiner: b + (1-2z)*a for the hard feedback bit z.
inline double g_kernel(double a, double b, int z) {
  return z ? b - a : b + a;
}

/// Constituent-code classes the decoder can resolve in closed form.
enum class SegmentKind : std::uint8_t { rate0, rate1, repetition, spc, generic };

inline const char* to_string(SegmentKind k) {
  switch (k) {
    case SegmentKind::rate0: return "rate0";
    case SegmentKind::rate1: return "rate1";
    case SegmentKind::repetition: return "repetition";
    case SegmentKind::spc: return "spc";
    default: return "generic";
  }
}

/// One leaf of the pruned recursion tree. Segments tile [0, N) and are
/// aligned nodes of the binary split tree (start % length == 0).
struct SegmentNode {
  SegmentKind kind;
  int start;
  int length;
};

/// Per-kind maximum segment lengths for shortcut detection. A cap of zero
/// disables the pattern; rate0/rate1 caps must be at least 1 so every
/// length-1 leaf stays classifiable.
struct ShortcutCaps {
  static constexpr int unlimited = 1 << 30;
  int rate0 = unlimited;
  int rate1 = unlimited;
  int repetition = 16;
  int spc = 8;

  /// Caps that reproduce the literal bit-by-bit recursion tree.
  static ShortcutCaps leaf_only() { return ShortcutCaps{1, 1, 0, 0}; }

  void validate() const {
    auto pow2 = [](int v) { return v > 0 && (v & (v - 1)) == 0; };
    if (!pow2(rate0) || rate0 < 1) throw std::invalid_argument("ShortcutCaps: rate0 cap must be a power of two >= 1");
    if (!pow2(rate1) || rate1 < 1) throw std::invalid_argument("ShortcutCaps: rate1 cap must be a power of two >= 1");
    if (repetition != 0 && (!pow2(repetition) || repetition < 2))
      throw std::invalid_argument("ShortcutCaps: repetition cap must be 0 or a power of two >= 2");
    if (spc != 0 && (!pow2(spc) || spc < 2))
      throw std::invalid_argument("ShortcutCaps: spc cap must be 0 or a power of two >= 2");
  }
};

namespace detail {

/// True when the frozen-mask slice matches the given constituent pattern.
inline bool matches_pattern(SegmentKind kind, const std::uint8_t* frozen, int len) {
  int n_frozen = 0;
  for (int i = 0; i < len; ++i) n_frozen += (frozen[i] != 0);
  switch (kind) {
    case SegmentKind::rate0: return n_frozen == len;
    case SegmentKind::rate1: return n_frozen == 0;
    case SegmentKind::repetition: return len >= 2 && n_frozen == len - 1 && !frozen[len - 1];
    case SegmentKind::spc: return len >= 2 && n_frozen == 1 && frozen[0] != 0;
    case SegmentKind::generic: return len == 1;
  }
  return false;
}

inline void detect_rec(const PolarCode& code, const ShortcutCaps& caps, int start, int len,
                       std::vector<SegmentNode>& out) {
  const std::uint8_t* m = code.frozen.data() + start;
  // Precedence: rate0, rate1, repetition, spc. The length-2 {frozen, free}
  // slice matches both repetition and spc; repetition wins.
  if (len <= caps.rate0 && matches_pattern(SegmentKind::rate0, m, len)) {
    out.push_back({SegmentKind::rate0, start, len});
    return;
  }
  if (len <= caps.rate1 && matches_pattern(SegmentKind::rate1, m, len)) {
    out.push_back({SegmentKind::rate1, start, len});
    return;
  }
  if (len <= caps.repetition && matches_pattern(SegmentKind::repetition, m, len)) {
    out.push_back({SegmentKind::repetition, start, len});
    return;
  }
  if (len <= caps.spc && matches_pattern(SegmentKind::spc, m, len)) {
    out.push_back({SegmentKind::spc, start, len});
    return;
  }
  if (len == 1) {
    out.push_back({SegmentKind::generic, start, len});
    return;
  }
  detect_rec(code, caps, start, len / 2, out);
  detect_rec(code, caps, start + len / 2, len / 2, out);
}

}  // namespace detail

/// Prunes the SC recursion tree: recursion stops at the largest segment
/// matching a shortcut pattern within its per-kind length cap. The returned
/// leaves are disjoint, cover [0, N), and appear in ascending start order.
inline std::vector<SegmentNode> detect_shortcuts(const PolarCode& code,
                                                 const ShortcutCaps& caps = ShortcutCaps{}) {
  caps.validate();
  code.validate();
  std::vector<SegmentNode> out;
  detail::detect_rec(code, caps, 0, code.block_length, out);
  return out;
}

/// Checks that a segment list is a valid pruned tree for this code:
/// aligned power-of-two tiling of [0, N) whose kinds match the frozen mask.
inline void validate_segments(const PolarCode& code, const std::vector<SegmentNode>& segs) {
  int expect = 0;
  for (const auto& s : segs) {
    if (s.start != expect)
      throw std::invalid_argument("segments do not tile [0, N) contiguously");
    if (s.length < 1 || (s.length & (s.length - 1)) != 0 || s.start % s.length != 0)
      throw std::invalid_argument("segment not aligned to the recursion tree");
    if (!detail::matches_pattern(s.kind, code.frozen.data() + s.start, s.length))
      throw std::invalid_argument("segment kind inconsistent with frozen mask at index " +
                                  std::to_string(s.start));
    expect += s.length;
  }
  if (expect != code.block_length)
    throw std::invalid_argument("segments do not cover [0, N)");
}

namespace detail {

/// Real-valued min-sum arithmetic; all shortcut closed forms replicate the
/// literal recursion's operation order so results stay bit-identical on
/// tie-free inputs.
struct float_ops {
  using value_type = double;
  std::vector<double> scratch;

  static double f(double a, double b, int /*depth*/) { return f_kernel(a, b); }
  static double g(double a, double b, std::uint8_t z, int /*depth*/) { return g_kernel(a, b, z); }
  static bool decide(double v) { return v < 0.0; }

  bool rep_decide(const double* v, int len, int /*depth*/) {
    scratch.assign(v, v + len);
    // same association order as the recursion: pair (i, i + half) per level
    for (int half = len / 2; half >= 1; half /= 2)
      for (int i = 0; i < half; ++i) scratch[i] = scratch[i + half] + scratch[i];
    return scratch[0] < 0.0;
  }

  static int min_abs_index(const double* v, int len) {
    int best = 0;
    for (int i = 1; i < len; ++i)
      if (std::fabs(v[i]) < std::fabs(v[best])) best = i;
    return best;
  }
};

/// Shared SC evaluation over a pruned segment tree. Ops supplies the value
/// type and kernels (float or quantized).
template <class Ops>
class sc_engine {
 public:
  using value_type = typename Ops::value_type;

  sc_engine(const PolarCode& code, std::vector<SegmentNode> segments)
      : code_(code), segments_(std::move(segments)) {
    validate_segments(code_, segments_);
    const int N = code_.block_length;
    leaf_at_.assign(N, -1);
    for (std::size_t i = 0; i < segments_.size(); ++i) leaf_at_[segments_[i].start] = static_cast<int>(i);
    llr_.resize(code_.n + 1);
    fb_.resize(code_.n + 1);
    left_fb_.resize(code_.n + 1);
    for (int d = 0; d <= code_.n; ++d) {
      llr_[d].resize(N >> d);
      fb_[d].resize(N >> d);
      left_fb_[d].resize(N >> d);
    }
  }

  const PolarCode& code() const { return code_; }
  const std::vector<SegmentNode>& segments() const { return segments_; }

  /// Decodes one frame; returns the systematic data estimate, i.e. the free
  /// positions of the re-encoded codeword estimate (the root feedback of the
  /// recursion). Not reentrant per instance.
  BitVector decode(Ops& ops, const value_type* channel, int len) {
    if (len != code_.block_length)
      throw std::invalid_argument("decode: LLR frame length must equal N");
    std::copy(channel, channel + len, llr_[0].begin());
    process(ops, 0, code_.block_length, 0);
    BitVector out;
    out.reserve(code_.info_length);
    for (int i = 0; i < code_.block_length; ++i)
      if (!code_.frozen[i]) out.push_back(fb_[0][i]);
    return out;
  }

 private:
  void process(Ops& ops, int start, int len, int depth) {
    const int li = leaf_at_[start];
    if (li >= 0 && segments_[li].length == len) {
      resolve_leaf(ops, segments_[li], depth);
      return;
    }
    const int half = len / 2;
    const value_type* in = llr_[depth].data();
    value_type* out = llr_[depth + 1].data();
    for (int i = 0; i < half; ++i) out[i] = ops.f(in[i], in[i + half], depth + 1);
    process(ops, start, half, depth + 1);
    std::copy_n(fb_[depth + 1].data(), half, left_fb_[depth + 1].data());
    const std::uint8_t* zl = left_fb_[depth + 1].data();
    for (int i = 0; i < half; ++i) out[i] = ops.g(in[i], in[i + half], zl[i], depth + 1);
    process(ops, start + half, half, depth + 1);
    const std::uint8_t* xr = fb_[depth + 1].data();
    std::uint8_t* fb = fb_[depth].data();
    for (int i = 0; i < half; ++i) {
      fb[i] = static_cast<std::uint8_t>(zl[i] ^ xr[i]);
      fb[i + half] = xr[i];
    }
  }

  void resolve_leaf(Ops& ops, const SegmentNode& seg, int depth) {
    const int len = seg.length;
    const value_type* v = llr_[depth].data();
    std::uint8_t* fb = fb_[depth].data();
    switch (seg.kind) {
      case SegmentKind::rate0:
        for (int i = 0; i < len; ++i) fb[i] = 0;
        break;
      case SegmentKind::rate1:
        for (int i = 0; i < len; ++i) fb[i] = ops.decide(v[i]) ? 1 : 0;
        break;
      case SegmentKind::repetition: {
        const std::uint8_t bit = ops.rep_decide(v, len, depth) ? 1 : 0;
        for (int i = 0; i < len; ++i) fb[i] = bit;
        break;
      }
      case SegmentKind::spc: {
        std::uint8_t parity = 0;
        for (int i = 0; i < len; ++i) {
          fb[i] = ops.decide(v[i]) ? 1 : 0;
          parity ^= fb[i];
        }
        if (parity) fb[ops.min_abs_index(v, len)] ^= 1;
        break;
      }
      case SegmentKind::generic:
        // only length-1 leaves reach here
        fb[0] = code_.frozen[seg.start] ? 0 : (ops.decide(v[0]) ? 1 : 0);
        break;
    }
  }

  PolarCode code_;
  std::vector<SegmentNode> segments_;
  std::vector<int> leaf_at_;
  std::vector<std::vector<value_type>> llr_;
  std::vector<std::vector<std::uint8_t>> fb_;
  std::vector<std::vector<std::uint8_t>> left_fb_;
};

}  // namespace detail

/// Reusable float SC decoder over a fixed segment tree; one instance per
/// worker thread in hot loops.
class ScDecoder {
 public:
  ScDecoder(const PolarCode& code, std::vector<SegmentNode> segments)
      : engine_(code, std::move(segments)) {}

  BitVector decode(const LlrVector& llr) {
    return engine_.decode(ops_, llr.data(), static_cast<int>(llr.size()));
  }

 private:
  detail::sc_engine<detail::float_ops> engine_;
  detail::float_ops ops_;
};

/// Literal SC recursion: frozen bits decode to zero, free bits to the sign
/// of their LLR (ties to 0), min-sum F, add/subtract G. Returns the
/// systematic data estimate (free positions of the re-encoded decision
/// vector), matching the systematic encoder's data placement.
inline BitVector decode_sc(const PolarCode& code, const LlrVector& llr) {
  ScDecoder dec(code, detect_shortcuts(code, ShortcutCaps::leaf_only()));
  return dec.decode(llr);
}

/// Shortcut-accelerated SC decode; bit-exact against decode_sc on inputs
/// free of exact magnitude ties (min-sum shortcuts are exact there).
inline BitVector decode_fast(const PolarCode& code, const LlrVector& llr,
                             const std::vector<SegmentNode>& shortcuts) {
  ScDecoder dec(code, shortcuts);
  return dec.decode(llr);
}

inline BitVector decode_fast(const PolarCode& code, const LlrVector& llr) {
  return decode_fast(code, llr, detect_shortcuts(code));
}

}  // namespace polarmc

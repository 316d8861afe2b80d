#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace polarmc {

/// A data/codeword bit sequence; each element is 0 or 1.
using BitVector = std::vector<std::uint8_t>;

/// Static definition of an (N, K) polar code: N = 2^n, frozen mask in
/// natural (non-bit-reversed) index order, frozen bits pinned to zero.
struct PolarCode {
  int n = 0;                        // log2 block length
  int block_length = 0;             // N = 2^n
  int info_length = 0;              // K
  double design_snr_db = 0.0;       // Eb/No used for construction
  std::vector<std::uint8_t> frozen; // length N, 1 = frozen

  double rate() const { return static_cast<double>(info_length) / block_length; }
  int frozen_count() const { return block_length - info_length; }

  std::vector<int> info_indices() const {
    std::vector<int> idx;
    idx.reserve(info_length);
    for (int i = 0; i < block_length; ++i)
      if (!frozen[i]) idx.push_back(i);
    return idx;
  }

  void validate() const {
    if (n < 1 || block_length != (1 << n))
      throw std::invalid_argument("PolarCode: block length must be 2^n with n >= 1");
    if (info_length < 1 || info_length > block_length)
      throw std::invalid_argument("PolarCode: K out of range");
    if (static_cast<int>(frozen.size()) != block_length)
      throw std::invalid_argument("PolarCode: frozen mask length mismatch");
    int nf = 0;
    for (auto f : frozen) nf += (f != 0);
    if (nf != block_length - info_length)
      throw std::invalid_argument("PolarCode: frozen count does not match N-K");
  }
};

namespace gauss_approx {

// Mean-LLR evolution for a binary-input AWGN channel, two-branch phi of
// Chung et al. Everything here works on the mean of a symmetric Gaussian
// LLR density; larger mean = more reliable synthetic channel.

inline double phi(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 10.0) {
    double v = std::exp(-0.4527 * std::pow(x, 0.86) + 0.0218);
    return v < 1.0 ? v : 1.0;
  }
  return std::sqrt(3.14159265358979323846 / x) * std::exp(-x / 4.0) *
         (1.0 - 10.0 / (7.0 * x));
}

inline double log_phi_tail(double x) {
  return -x / 4.0 + 0.5 * (std::log(3.14159265358979323846) - std::log(x)) +
         std::log1p(-10.0 / (7.0 * x));
}

inline double phi_inv(double target) {
  if (target >= 1.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (phi(hi) > target) {
    hi *= 2.0;
    if (hi > 1e9) return hi;
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (phi(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Mean after the check (upper/minus) transform: phi(c) = 1 - (1 - phi(m))^2.
inline double check_mean(double m) {
  if (m <= 0.0) return 0.0;
  if (m > 64.0) {
    // phi underflows; solve in the log domain on the tail branch.
    double lphi = log_phi_tail(m);
    double phi_m = std::exp(std::max(lphi, -700.0));
    double ltarget = lphi + std::log(2.0 - phi_m);
    double c = m - 4.0 * std::log(2.0);
    for (int it = 0; it < 8; ++it)
      c = -4.0 * (ltarget - 0.5 * (std::log(3.14159265358979323846) - std::log(c)) -
                  std::log1p(-10.0 / (7.0 * c)));
    return c;
  }
  double p = phi(m);
  return phi_inv(p * (2.0 - p));
}

/// Mean LLRs of all 2^n synthetic channels in natural index order for a
/// channel-LLR mean of m0. Stage t halves split as (check | doubled), so
/// index bits are consumed most-significant first, matching the decoder's
/// first-half/second-half recursion.
inline std::vector<double> channel_means(int n, double m0) {
  std::vector<double> cur{m0};
  for (int t = 0; t < n; ++t) {
    std::vector<double> next(cur.size() * 2);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      next[2 * i] = check_mean(cur[i]);
      next[2 * i + 1] = 2.0 * cur[i];
    }
    cur.swap(next);
  }
  return cur;
}

}  // namespace gauss_approx

/// Builds an (N=2^n, K) code by freezing the N-K least reliable synthetic
/// channels under Gaussian-approximation density evolution at design_snr_db
/// (Eb/No, dB). Ties freeze the lower index first. Deterministic.
inline PolarCode construct_code(int n, int K, double design_snr_db = 6.0) {
  if (n < 1 || n > 30) throw std::invalid_argument("construct_code: n must be in [1, 30]");
  const int N = 1 << n;
  if (K < 1 || K > N) throw std::invalid_argument("construct_code: K must satisfy 1 <= K <= 2^n");

  const double rate = static_cast<double>(K) / N;
  const double ebno_lin = std::pow(10.0, design_snr_db / 10.0);
  const double mean0 = 4.0 * rate * ebno_lin;  // 2/sigma^2 with sigma^2 = 1/(2 R Eb/No)

  auto means = gauss_approx::channel_means(n, mean0);
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (means[a] != means[b]) return means[a] < means[b];
    return a < b;
  });

  PolarCode code;
  code.n = n;
  code.block_length = N;
  code.info_length = K;
  code.design_snr_db = design_snr_db;
  code.frozen.assign(N, 0);
  for (int i = 0; i < N - K; ++i) code.frozen[order[i]] = 1;
  return code;
}

/// In-place polar transform x = u * G_N over GF(2), G_N = F^{(x)n} with
/// F = [[1,0],[1,1]], natural bit order. Involutive.
inline void polar_transform_inplace(std::uint8_t* u, int block_length) {
  for (int len = 1; len < block_length; len <<= 1)
    for (int blk = 0; blk < block_length; blk += 2 * len)
      for (int i = blk; i < blk + len; ++i) u[i] ^= u[i + len];
}

inline void polar_transform_inplace(BitVector& u) {
  polar_transform_inplace(u.data(), static_cast<int>(u.size()));
}

/// Non-systematic encoding: x = u * G_N via the butterfly recursion.
/// Pre: frozen positions of u are zero.
inline BitVector encode(const PolarCode& code, BitVector u) {
  if (static_cast<int>(u.size()) != code.block_length)
    throw std::invalid_argument("encode: input length must equal N");
  polar_transform_inplace(u);
  return u;
}

/// Systematic encoding by the two-pass transform: the K data bits appear
/// verbatim at the free positions of the returned codeword.
inline BitVector encode_systematic(const PolarCode& code, const BitVector& data) {
  if (static_cast<int>(data.size()) != code.info_length)
    throw std::invalid_argument("encode_systematic: input length must equal K");
  BitVector u(code.block_length, 0);
  int j = 0;
  for (int i = 0; i < code.block_length; ++i)
    if (!code.frozen[i]) u[i] = data[j++];
  polar_transform_inplace(u);
  for (int i = 0; i < code.block_length; ++i)
    if (code.frozen[i]) u[i] = 0;
  polar_transform_inplace(u);
  return u;
}

}  // namespace polarmc

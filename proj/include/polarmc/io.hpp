#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "polarmc/arch_model.hpp"
#include "polarmc/errors.hpp"
#include "polarmc/link_sim.hpp"
#include "polarmc/polar_code.hpp"
#include "polarmc/quant.hpp"

namespace polarmc {

// ---------------------------------------------------------------- bit masks

/// Frozen mask to hex, MSB-first: mask bit 0 is the most significant bit of
/// the first hex digit; ceil(N/4) digits.
inline std::string mask_to_hex(const std::vector<std::uint8_t>& mask) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve((mask.size() + 3) / 4);
  for (std::size_t i = 0; i < mask.size(); i += 4) {
    int nib = 0;
    for (std::size_t j = 0; j < 4 && i + j < mask.size(); ++j)
      if (mask[i + j]) nib |= 8 >> j;
    out.push_back(digits[nib]);
  }
  return out;
}

inline std::vector<std::uint8_t> hex_to_mask(const std::string& hex, int n_bits) {
  if (static_cast<int>(hex.size()) != (n_bits + 3) / 4)
    throw config_error("frozen mask hex length does not match N");
  std::vector<std::uint8_t> mask(n_bits, 0);
  for (int i = 0; i < n_bits; ++i) {
    const char c = hex[i / 4];
    int nib;
    if (c >= '0' && c <= '9')
      nib = c - '0';
    else if (c >= 'a' && c <= 'f')
      nib = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F')
      nib = c - 'A' + 10;
    else
      throw config_error("frozen mask contains a non-hex character");
    mask[i] = (nib >> (3 - i % 4)) & 1;
  }
  return mask;
}

// ------------------------------------------------------------- packed bits

/// MSB-first within bytes, each frame padded to a byte boundary.
inline std::vector<std::uint8_t> pack_bits(const BitVector& bits) {
  std::vector<std::uint8_t> out((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  return out;
}

inline BitVector unpack_bits(const std::uint8_t* bytes, int n_bits) {
  BitVector out(n_bits);
  for (int i = 0; i < n_bits; ++i) out[i] = (bytes[i / 8] >> (7 - i % 8)) & 1;
  return out;
}

// ------------------------------------------------------------------- files

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return data;
}

inline void write_file_bytes(const std::string& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw io_error("write failed: " + path);
}

inline void write_file_text(const std::string& path, const std::string& text) {
  write_file_bytes(path, text.data(), text.size());
}

// --------------------------------------------------------------- code JSON

inline nlohmann::json code_to_json(const PolarCode& code) {
  return nlohmann::json{{"n", code.n},
                        {"K", code.info_length},
                        {"design_snr_db", code.design_snr_db},
                        {"frozen_mask", mask_to_hex(code.frozen)}};
}

inline PolarCode code_from_json(const nlohmann::json& j) {
  PolarCode code;
  try {
    code.n = j.at("n").get<int>();
    code.info_length = j.at("K").get<int>();
    code.design_snr_db = j.value("design_snr_db", 6.0);
    code.block_length = 1 << code.n;
    code.frozen = hex_to_mask(j.at("frozen_mask").get<std::string>(), code.block_length);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad code file: ") + e.what());
  }
  code.validate();
  return code;
}

inline void save_code(const PolarCode& code, const std::string& path) {
  write_file_text(path, code_to_json(code).dump(2) + "\n");
}

inline PolarCode load_code(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad code file: ") + e.what());
  }
  return code_from_json(j);
}

// ----------------------------------------------------------- schedule JSON

inline nlohmann::json schedule_to_json(const QuantSchedule& s) {
  return nlohmann::json{
      {"channel_bits", s.channel_bits}, {"step", s.step}, {"per_depth_bits", s.per_depth_bits}};
}

inline QuantSchedule schedule_from_json(const nlohmann::json& j) {
  QuantSchedule s;
  try {
    s.channel_bits = j.at("channel_bits").get<int>();
    s.step = j.at("step").get<double>();
    s.per_depth_bits = j.at("per_depth_bits").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad schedule file: ") + e.what());
  }
  return s;
}

inline void save_schedule(const QuantSchedule& s, const std::string& path) {
  write_file_text(path, schedule_to_json(s).dump(2) + "\n");
}

inline QuantSchedule load_schedule(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return schedule_from_json(nlohmann::json::parse(bytes.begin(), bytes.end()));
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad schedule file: ") + e.what());
  }
}

// -------------------------------------------------------- delay model JSON

inline nlohmann::json delay_model_to_json(const DelayModel& m) {
  return nlohmann::json{{"f_layer", m.f_layer},
                        {"g_layer", m.g_layer},
                        {"decision", m.decision},
                        {"feedback_xor", m.feedback_xor},
                        {"rate0", m.rate0},
                        {"rep_base", m.rep_base},
                        {"rep_per_log2", m.rep_per_log2},
                        {"spc_base", m.spc_base},
                        {"spc_per_log2", m.spc_per_log2},
                        {"scale", m.scale}};
}

inline DelayModel delay_model_from_json(const nlohmann::json& j) {
  DelayModel m;
  try {
    m.f_layer = j.value("f_layer", m.f_layer);
    m.g_layer = j.value("g_layer", m.g_layer);
    m.decision = j.value("decision", m.decision);
    m.feedback_xor = j.value("feedback_xor", m.feedback_xor);
    m.rate0 = j.value("rate0", m.rate0);
    m.rep_base = j.value("rep_base", m.rep_base);
    m.rep_per_log2 = j.value("rep_per_log2", m.rep_per_log2);
    m.spc_base = j.value("spc_base", m.spc_base);
    m.spc_per_log2 = j.value("spc_per_log2", m.spc_per_log2);
    m.scale = j.value("scale", m.scale);
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad delay model file: ") + e.what());
  }
  m.validate();
  return m;
}

inline DelayModel load_delay_model(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return delay_model_from_json(nlohmann::json::parse(bytes.begin(), bytes.end()));
  } catch (const nlohmann::json::exception& e) {
    throw config_error(std::string("bad delay model file: ") + e.what());
  }
}

// ------------------------------------------------------------- LLR frames

/// Binary little-endian 32-bit floats, N values per frame.
inline void write_llr_frames(const std::string& path, const std::vector<LlrVector>& frames) {
  std::vector<std::uint8_t> buf;
  for (const auto& f : frames)
    for (double v : f) {
      const std::uint32_t u = std::bit_cast<std::uint32_t>(static_cast<float>(v));
      buf.push_back(static_cast<std::uint8_t>(u & 0xff));
      buf.push_back(static_cast<std::uint8_t>((u >> 8) & 0xff));
      buf.push_back(static_cast<std::uint8_t>((u >> 16) & 0xff));
      buf.push_back(static_cast<std::uint8_t>((u >> 24) & 0xff));
    }
  write_file_bytes(path, buf.data(), buf.size());
}

inline std::vector<LlrVector> read_llr_frames(const std::string& path, int frame_len) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() % (4u * frame_len) != 0)
    throw io_error(path + ": size is not a multiple of 4*N bytes");
  const std::size_t n_frames = bytes.size() / (4u * frame_len);
  std::vector<LlrVector> frames(n_frames, LlrVector(frame_len));
  std::size_t k = 0;
  for (auto& f : frames)
    for (auto& v : f) {
      std::uint32_t u = bytes[k] | (bytes[k + 1] << 8) | (bytes[k + 2] << 16) |
                        (static_cast<std::uint32_t>(bytes[k + 3]) << 24);
      v = static_cast<double>(std::bit_cast<float>(u));
      k += 4;
    }
  return frames;
}

// --------------------------------------------------- quantized LLR frames

/// One byte per LLR: bit 7 = sign, bits 3..0 = magnitude, others zero.
inline void write_qllr_frames(const std::string& path, const std::vector<std::vector<QLlr>>& frames) {
  std::vector<std::uint8_t> buf;
  for (const auto& f : frames)
    for (QLlr v : f) {
      if (v.mag > 15) throw config_error("qllr frame format holds magnitudes up to 15 (<= 5 bits)");
      buf.push_back(static_cast<std::uint8_t>((v.negative ? 0x80 : 0x00) | v.mag));
    }
  write_file_bytes(path, buf.data(), buf.size());
}

inline std::vector<std::vector<QLlr>> read_qllr_frames(const std::string& path, int frame_len) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() % static_cast<std::size_t>(frame_len) != 0)
    throw io_error(path + ": size is not a multiple of N bytes");
  const std::size_t n_frames = bytes.size() / frame_len;
  std::vector<std::vector<QLlr>> frames(n_frames, std::vector<QLlr>(frame_len));
  std::size_t k = 0;
  for (auto& f : frames)
    for (auto& v : f) {
      const std::uint8_t b = bytes[k++];
      if (b & 0x70) throw io_error(path + ": reserved qllr bits set");
      v = QLlr{(b & 0x80) != 0, static_cast<std::uint8_t>(b & 0x0f)};
    }
  return frames;
}

// -------------------------------------------------------------- bit frames

inline void write_bit_frames(const std::string& path, const std::vector<BitVector>& frames) {
  std::vector<std::uint8_t> buf;
  for (const auto& f : frames) {
    const auto packed = pack_bits(f);
    buf.insert(buf.end(), packed.begin(), packed.end());
  }
  write_file_bytes(path, buf.data(), buf.size());
}

inline std::vector<BitVector> read_bit_frames(const std::string& path, int bits_per_frame) {
  const auto bytes = read_file_bytes(path);
  const std::size_t frame_bytes = (bits_per_frame + 7) / 8;
  if (frame_bytes == 0 || bytes.size() % frame_bytes != 0)
    throw io_error(path + ": size is not a multiple of the frame byte length");
  const std::size_t n_frames = bytes.size() / frame_bytes;
  std::vector<BitVector> frames;
  frames.reserve(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i)
    frames.push_back(unpack_bits(bytes.data() + i * frame_bytes, bits_per_frame));
  return frames;
}

// ------------------------------------------------------------------ SHA-256

namespace detail {

struct sha256_ctx {
  std::uint32_t h[8] = {0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
                        0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};
  std::uint64_t total = 0;
  std::uint8_t buf[64];
  std::size_t fill = 0;

  static std::uint32_t rotr(std::uint32_t x, int r) { return (x >> r) | (x << (32 - r)); }

  void block(const std::uint8_t* p) {
    static const std::uint32_t K[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
        0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
        0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
        0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
        0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
        0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
        0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
        0xc67178f2};
    std::uint32_t w[64];
    for (int i = 0; i < 16; ++i)
      w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
             (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
    for (int i = 16; i < 64; ++i) {
      const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
      const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
      w[i] = w[i - 16] + s0 + w[i - 7] + s1;
    }
    std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6], hh = h[7];
    for (int i = 0; i < 64; ++i) {
      const std::uint32_t S1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
      const std::uint32_t ch = (e & f) ^ (~e & g);
      const std::uint32_t t1 = hh + S1 + ch + K[i] + w[i];
      const std::uint32_t S0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
      const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
      const std::uint32_t t2 = S0 + maj;
      hh = g; g = f; f = e; e = d + t1; d = c; c = b; b = a; a = t1 + t2;
    }
    h[0] += a; h[1] += b; h[2] += c; h[3] += d; h[4] += e; h[5] += f; h[6] += g; h[7] += hh;
  }

  void update(const void* data, std::size_t len) {
    const std::uint8_t* p = static_cast<const std::uint8_t*>(data);
    total += len;
    while (len > 0) {
      const std::size_t take = std::min<std::size_t>(64 - fill, len);
      std::memcpy(buf + fill, p, take);
      fill += take;
      p += take;
      len -= take;
      if (fill == 64) {
        block(buf);
        fill = 0;
      }
    }
  }

  std::string finish() {
    const std::uint64_t bits = total * 8;
    const std::uint8_t one = 0x80;
    update(&one, 1);
    const std::uint8_t zero = 0;
    while (fill != 56) update(&zero, 1);
    std::uint8_t len_be[8];
    for (int i = 0; i < 8; ++i) len_be[i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
    update(len_be, 8);
    char out[65];
    for (int i = 0; i < 8; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
    return std::string(out, 64);
  }
};

}  // namespace detail

inline std::string sha256_hex(const void* data, std::size_t len) {
  detail::sha256_ctx ctx;
  ctx.update(data, len);
  return ctx.finish();
}

inline std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

inline std::string sha256_file(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  return sha256_hex(bytes.data(), bytes.size());
}

// --------------------------------------------------------------- sweep CSV

/// Fixed column set; formatting is deterministic so identical runs produce
/// byte-identical files.
inline std::string sweep_csv(const std::vector<ErrorStats>& points) {
  std::string out = "ebno_db,frames,frame_errors,bit_errors,fer,ber,fer_ci_lo,fer_ci_hi,uncoded_ber\n";
  char line[320];
  for (const auto& p : points) {
    const auto ci = wilson_interval(p.frame_errors, p.frames);
    std::snprintf(line, sizeof(line), "%.4f,%llu,%llu,%llu,%.9e,%.9e,%.9e,%.9e,%.9e\n", p.ebno_db,
                  static_cast<unsigned long long>(p.frames),
                  static_cast<unsigned long long>(p.frame_errors),
                  static_cast<unsigned long long>(p.bit_errors), p.fer(), p.ber(), ci.first,
                  ci.second, uncoded_bpsk_ber(p.ebno_db));
    out += line;
  }
  return out;
}

}  // namespace polarmc

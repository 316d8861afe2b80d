// Smallest end-to-end use of the library: build a code, push random data
// through the systematic encoder, an AWGN channel and the fast SC decoder,
// and report the error rates.

#include <cstdio>

#include "polarmc/link_sim.hpp"

int main() {
  using namespace polarmc;

  const auto code = construct_code(8, 128, 4.0);  // (256, 128) at 4 dB design point
  const auto shortcuts = detect_shortcuts(code);
  ScDecoder decoder(code, shortcuts);

  const double ebno_db = 3.0;
  std::uint64_t frames = 0, frame_errors = 0, bit_errors = 0;
  Lfsr source;  // PRBS-31

  for (int f = 0; f < 2000; ++f) {
    auto [data, next] = lfsr_next_block(source, code.info_length);
    source = next;
    const auto cw = encode_systematic(code, data);
    NormalSampler noise(mix_seeds(1234, f));
    const auto llr = awgn_llr(cw, ebno_db, code.rate(), noise);
    const auto decided = decoder.decode(llr);

    int nerr = 0;
    for (int i = 0; i < code.info_length; ++i) nerr += (decided[i] != data[i]);
    ++frames;
    frame_errors += (nerr > 0);
    bit_errors += nerr;
  }

  std::printf("(%d, %d) polar code at %.1f dB: FER %.3e, BER %.3e over %llu frames\n",
              code.block_length, code.info_length, ebno_db,
              double(frame_errors) / frames, double(bit_errors) / (frames * code.info_length),
              static_cast<unsigned long long>(frames));
  return 0;
}

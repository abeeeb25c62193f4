#pragma once

#include "wbc/codec.hpp"

namespace wbc {

struct DecodeResult {
  std::vector<Bits> w, s;
};

// Receiver 1 decodes blocks forward: its decrypted side information pins the
// first block, and each decoded block supplies the chained content that pins
// the next block's otherwise-undecodable indices.
DecodeResult decode_rx1(const SessionLayout& lay, const Bits& key_theta, const Bits& key_gamma,
                        const Bits& key_side1, const std::vector<Symbols>& y1_blocks,
                        const Bits& side_info1);

// Receiver 2 decodes blocks backward from the last block, which its side
// information pins directly; successor blocks supply the chained content.
DecodeResult decode_rx2(const SessionLayout& lay, const Bits& key_theta, const Bits& key_gamma,
                        const Bits& key_side2, const std::vector<Symbols>& y2_blocks,
                        const Bits& side_info2);

}  // namespace wbc

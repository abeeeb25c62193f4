#pragma once

#include <vector>

#include "wbc/polar.hpp"
#include "wbc/sets.hpp"

namespace wbc {

// Everything the encoder and both decoders share about one session shape:
// the chaining plan plus every derived index list and positional map.
struct SessionLayout {
  WiretapSpec spec;
  PolarizedSets sets;
  Partition part;
  ChainingPlan plan;
  size_t n = 0;
  size_t blocks = 0;  // L

  IndexList s_first, s_mid, s_last;  // confidential-message homes by block position
  IndexList i_g2;                    // I n G2, the repeated tail content
  IndexList ups1, ups2;              // H_V n L_k^c: seed positions revealed to receiver k
  IndexList phi1, phi2;              // (H_V)^c n L_k^c: per-block revealed fill positions
  IndexList v_mid, v_low;            // carrier fill: sampled / argmax index sets
  IndexList x_seed, x_rand;          // prefix layer: H_{X|VZ} / H_{X|V} \ H_{X|VZ}
  IndexList x_mid, x_low;            // prefix fill: sampled / argmax index sets

  std::vector<int32_t> pos_c1_in_c, pos_c12_in_c;        // C-cell positions inside the W word
  std::vector<int32_t> pos_rlambda_in_ups1;              // seed positions inside the ups1 word

  const IndexList& s_home(size_t block_1based) const {
    if (block_1based == 1) return s_first;
    if (block_1based == blocks) return s_last;
    return s_mid;
  }
};

// Derives the layout (partition -> case -> plan -> index algebra) and verifies
// the structural coverage invariants once. Throws CaseUndefined/InfeasiblePlan
// from the plan stage and DimensionMismatch if an internal audit fails.
SessionLayout make_layout(const WiretapSpec& spec, const PolarizedSets& sets, size_t blocks);

// One-time key material shared with the receivers out of band.
struct SessionKeys {
  Bits theta;     // |C1|
  Bits gamma;     // |C12|
  Bits side1;     // |ups1| + L * |phi1|
  Bits side2;     // |ups2| + L * |phi2|
  Bits lambda_x;  // |x_seed|, the session-constant prefix seed
};

SessionKeys generate_keys(const SessionLayout& lay, Rng& rng);

struct MessageDims {
  size_t w_bits = 0;             // per block
  std::vector<size_t> s_bits;    // per block, position dependent
  size_t r_bits = 0;             // per block prefix randomizer
};

MessageDims message_dimensions(const SessionLayout& lay);

struct SessionInput {
  std::vector<Bits> w, s, r;
};

SessionInput random_session_input(const SessionLayout& lay, Rng& rng);

struct Session {
  std::vector<Bits> x_blocks;
  Bits side_info1, side_info2;  // key-encrypted (Upsilon || Phi_1..Phi_L)
};

// Optional visibility into the encoder for tests and exact evaluation.
struct EncodeTrace {
  std::vector<Bits> a;  // carrier blocks, u-domain
  std::vector<Bits> t;  // prefix blocks, u-domain
  std::vector<Bits> x;  // channel inputs
  std::vector<Bits> psi, gamma_plain, pi, lambda;  // per-block chain reads
  std::vector<Bits> theta_bar, gamma_bar;          // masked chain words per block
  Bits filler_bits;                                // last-block R1 n G0 content
};

// Writes message and chaining content into carrier block i (1-based).
// Boundary sequences are zero vectors of the proper slot size.
void form_a_g(const SessionLayout& lay, size_t i, Bits& a, const Bits& w_i, const Bits& s_i,
              const Bits& theta_bar_next, const Bits& gamma_bar_next, const Bits& psi_prev,
              const Bits& gamma_prev, const Bits& pi_prev, const Bits& lambda_prev,
              const Bits& filler_bits);

// SC-fills the remaining carrier indices (middle: posterior sample, low:
// argmax) given the content already placed on H_V; returns the full u-block.
Bits complete_carrier(const SessionLayout& lay, const Bits& a_content, Rng& rng);

// Prefix layer: seeds H_{X|VZ} with lambda_x, injects the block randomizer
// into H_{X|V} \ H_{X|VZ}, samples the middle set, argmaxes the low set.
// Returns the channel input block; t_out receives the u-domain prefix block.
Bits channel_prefix(const SessionLayout& lay, const Bits& v_block, const Bits& r_i,
                    const Bits& lambda_x, Rng& rng, Bits* t_out = nullptr);

Session encode_session(const SessionLayout& lay, const SessionInput& input, const SessionKeys& keys,
                       Rng& rng, EncodeTrace* trace = nullptr);

}  // namespace wbc

#include "wbc/decoder.hpp"

#include <string>

namespace wbc {
namespace {

void require_len(const Bits& v, size_t len, const char* what) {
  if (v.size() != len)
    throw LengthMismatch(std::string(what) + ": expected " + std::to_string(len) + " bits, got " +
                         std::to_string(v.size()));
}

void check_blocks(const SessionLayout& lay, const std::vector<Symbols>& obs, const OutputLaw& law,
                  const char* who) {
  if (obs.size() != lay.blocks)
    throw LengthMismatch(std::string(who) + ": observation block count differs from session length");
  for (const Symbols& block : obs) {
    if (block.size() != lay.n)
      throw LengthMismatch(std::string(who) + ": observation block length differs from n");
    for (uint8_t sym : block)
      if (sym >= law.alphabet)
        throw DimensionMismatch(std::string(who) + ": observation symbol outside the output alphabet");
  }
}

void pin(std::vector<int>& known, const IndexList& idx, const Bits& vals, const char* what) {
  if (idx.size() != vals.size())
    throw LengthMismatch(std::string(what) + ": pinned value count differs from index count");
  for (size_t k = 0; k < idx.size(); ++k) known[idx[k]] = vals[k];
}

// Every index the receiver cannot SC-decode on its own must arrive pinned.
void check_pinned(const std::vector<int>& known, const IndexList& needed, const char* who) {
  for (uint32_t j : needed)
    if (known[j] == kDecode)
      throw DimensionMismatch(std::string(who) + ": undecodable index " + std::to_string(j) +
                              " was left unpinned");
}

Bits zeros(size_t len) { return Bits(len, 0); }

}  // namespace

DecodeResult decode_rx1(const SessionLayout& lay, const Bits& key_theta, const Bits& key_gamma,
                        const Bits& key_side1, const std::vector<Symbols>& y1_blocks,
                        const Bits& side_info1) {
  const Partition& part = lay.part;
  const ChainingPlan& plan = lay.plan;
  const size_t n = lay.n;
  const size_t last = lay.blocks;
  require_len(key_theta, part.C1.size(), "C1 key");
  require_len(key_gamma, part.C12.size(), "C12 key");
  require_len(key_side1, lay.ups1.size() + last * lay.phi1.size(), "receiver 1 side key");
  require_len(side_info1, key_side1.size(), "receiver 1 side information");
  check_blocks(lay, y1_blocks, lay.spec.y1, "receiver 1");

  const IndexList needed = complement_of(lay.sets.low_set(Conditioning::CarrierY1), n);
  Bits plain = xor_bits(side_info1, key_side1);
  Bits ups_bits = slice_bits(plain, 0, lay.ups1.size());

  Bits lambda_hat(plan.RLambda.size());
  for (size_t k = 0; k < lambda_hat.size(); ++k)
    lambda_hat[k] = ups_bits[lay.pos_rlambda_in_ups1[k]];

  DecodeResult out;
  Bits psi_prev = zeros(part.C2.size());       // previous block's C2 content
  Bits gamma_prev = zeros(part.C12.size());    // previous block's plain C12 content
  Bits pi_prev = zeros(lay.i_g2.size());
  Bits theta_cur, gamma_cur;                   // chain-recovered content for the current block

  for (size_t i = 1; i <= last; ++i) {
    std::vector<int> known(n, kDecode);
    if (i == 1) {
      pin(known, lay.ups1, ups_bits, "first-block seed");
    } else {
      pin(known, part.C1, theta_cur, "chained C1 content");
      pin(known, part.C12, gamma_cur, "chained C12 content");
      pin(known, plan.R2, slice_bits(psi_prev, 0, plan.R2.size()), "repeated C2 content");
      pin(known, plan.R2p, slice_bits(gamma_prev, plan.gamma.first, plan.R2p.size()),
          "repeated C12 content");
      pin(known, plan.RS, pi_prev, "repeated tail content");
      pin(known, plan.RLambda, lambda_hat, "carrier seed");
    }
    pin(known, lay.phi1, slice_bits(plain, lay.ups1.size() + (i - 1) * lay.phi1.size(),
                                    lay.phi1.size()),
        "revealed fill bits");
    check_pinned(known, needed, "receiver 1");

    Bits a_hat = sc_decode(carrier_law_with_output(lay.spec, lay.spec.y1, y1_blocks[i - 1]), known);
    out.w.push_back(gather(a_hat, part.C));
    out.s.push_back(gather(a_hat, lay.s_home(i)));

    if (i < last) {
      // Unmask the next block's chained content from this block's slots.
      Bits theta_bar_next =
          concat_bits(gather(a_hat, plan.R1),
                      xor_bits(gather(a_hat, plan.R12p),
                               slice_bits(psi_prev, plan.psi.first, plan.R12p.size())));
      Bits gamma_bar_next =
          concat_bits(xor_bits(gather(a_hat, plan.R12),
                               slice_bits(gamma_prev, 0, plan.R12.size())),
                      gather(a_hat, plan.R1p));
      theta_cur = xor_bits(theta_bar_next, key_theta);
      gamma_cur = xor_bits(gamma_bar_next, key_gamma);
    }
    psi_prev = gather(a_hat, part.C2);
    gamma_prev = gather(a_hat, part.C12);
    pi_prev = gather(a_hat, lay.i_g2);
  }
  return out;
}

DecodeResult decode_rx2(const SessionLayout& lay, const Bits& key_theta, const Bits& key_gamma,
                        const Bits& key_side2, const std::vector<Symbols>& y2_blocks,
                        const Bits& side_info2) {
  const Partition& part = lay.part;
  const ChainingPlan& plan = lay.plan;
  const size_t n = lay.n;
  const size_t last = lay.blocks;
  require_len(key_theta, part.C1.size(), "C1 key");
  require_len(key_gamma, part.C12.size(), "C12 key");
  require_len(key_side2, lay.ups2.size() + last * lay.phi2.size(), "receiver 2 side key");
  require_len(side_info2, key_side2.size(), "receiver 2 side information");
  check_blocks(lay, y2_blocks, lay.spec.y2, "receiver 2");

  const IndexList needed = complement_of(lay.sets.low_set(Conditioning::CarrierY2), n);
  Bits plain = xor_bits(side_info2, key_side2);
  Bits ups_bits = slice_bits(plain, 0, lay.ups2.size());
  auto phi_slice = [&](size_t i) {
    return slice_bits(plain, lay.ups2.size() + (i - 1) * lay.phi2.size(), lay.phi2.size());
  };

  std::vector<Bits> a_hat(last);
  std::vector<Bits> theta_bar_hat(last), gamma_bar_hat(last);  // masked words per block, 0-based

  {
    std::vector<int> known(n, kDecode);
    pin(known, lay.ups2, ups_bits, "last-block seed");
    pin(known, lay.phi2, phi_slice(last), "revealed fill bits");
    check_pinned(known, needed, "receiver 2");
    a_hat[last - 1] =
        sc_decode(carrier_law_with_output(lay.spec, lay.spec.y2, y2_blocks[last - 1]), known);
  }
  Bits lambda_hat = gather(a_hat[last - 1], plan.RLambda);
  theta_bar_hat[last - 1] = xor_bits(gather(a_hat[last - 1], part.C1), key_theta);
  gamma_bar_hat[last - 1] = xor_bits(gather(a_hat[last - 1], part.C12), key_gamma);

  for (size_t i = last - 1; i >= 1; --i) {
    const Bits& theta_bar_next = theta_bar_hat[i];  // block i+1, 0-based storage
    const Bits& gamma_bar_next = gamma_bar_hat[i];
    Bits theta_bar_nn = (i + 2 <= last) ? theta_bar_hat[i + 1] : zeros(part.C1.size());
    Bits gamma_bar_nn = (i + 2 <= last) ? gamma_bar_hat[i + 1] : zeros(part.C12.size());
    const Bits& succ = a_hat[i];  // decoded block i+1

    Bits psi_i = concat_bits(gather(succ, plan.R2),
                             xor_bits(gather(succ, plan.R12p),
                                      slice_bits(theta_bar_nn, plan.theta_bar.first,
                                                 plan.R12p.size())));
    Bits gamma_i = concat_bits(xor_bits(gather(succ, plan.R12),
                                        slice_bits(gamma_bar_nn, 0, plan.R12.size())),
                               gather(succ, plan.R2p));

    std::vector<int> known(n, kDecode);
    pin(known, plan.R1, slice_bits(theta_bar_next, 0, plan.R1.size()), "next masked C1 content");
    pin(known, plan.R1p, slice_bits(gamma_bar_next, plan.gamma_bar.first, plan.R1p.size()),
        "next masked C12 content");
    pin(known, part.C2, psi_i, "recovered C2 content");
    pin(known, part.C12, gamma_i, "recovered C12 content");
    pin(known, lay.i_g2, gather(succ, plan.RS), "repeated tail content");
    pin(known, plan.RLambda, lambda_hat, "carrier seed");
    pin(known, lay.phi2, phi_slice(i), "revealed fill bits");
    check_pinned(known, needed, "receiver 2");

    a_hat[i - 1] = sc_decode(carrier_law_with_output(lay.spec, lay.spec.y2, y2_blocks[i - 1]), known);
    theta_bar_hat[i - 1] = xor_bits(gather(a_hat[i - 1], part.C1), key_theta);
    gamma_bar_hat[i - 1] = xor_bits(gather(a_hat[i - 1], part.C12), key_gamma);
  }

  DecodeResult out;
  for (size_t i = 1; i <= last; ++i) {
    out.w.push_back(gather(a_hat[i - 1], part.C));
    out.s.push_back(gather(a_hat[i - 1], lay.s_home(i)));
  }
  return out;
}

}  // namespace wbc

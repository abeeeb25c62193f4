#include "wbc/codec.hpp"

#include <string>

namespace wbc {
namespace {

// Positions of each member of `members` inside the sorted list `container`.
std::vector<int32_t> positions_within(const IndexList& members, const IndexList& container,
                                      const char* what) {
  std::vector<int32_t> pos(members.size());
  for (size_t i = 0; i < members.size(); ++i) {
    auto it = std::lower_bound(container.begin(), container.end(), members[i]);
    if (it == container.end() || *it != members[i])
      throw DimensionMismatch(std::string(what) + ": member not inside its container set");
    pos[i] = static_cast<int32_t>(it - container.begin());
  }
  return pos;
}

void audit_cover(const std::vector<const IndexList*>& writers, const IndexList& target, size_t n,
                 const char* where) {
  std::vector<uint8_t> count(n, 0);
  for (const IndexList* w : writers)
    for (uint32_t j : *w) ++count[j];
  std::vector<uint8_t> want(n, 0);
  for (uint32_t j : target) want[j] = 1;
  for (size_t j = 0; j < n; ++j)
    if (count[j] != want[j])
      throw DimensionMismatch(std::string(where) + ": block writers do not cover the carrier "
                              "content set exactly (index " + std::to_string(j) + ")");
}

void require_len(const Bits& v, size_t len, const char* what) {
  if (v.size() != len)
    throw LengthMismatch(std::string(what) + ": expected " + std::to_string(len) + " bits, got " +
                         std::to_string(v.size()));
}

Bits zeros(size_t len) { return Bits(len, 0); }

}  // namespace

SessionLayout make_layout(const WiretapSpec& spec, const PolarizedSets& sets, size_t blocks) {
  if (blocks < 2) throw ConfigError("a session needs at least two blocks");
  if (sets.n == 0 || !is_pow2(sets.n)) throw DimensionMismatch("set system has no valid block length");

  SessionLayout lay;
  lay.spec = spec;
  lay.spec.validate();
  lay.sets = sets;
  lay.n = sets.n;
  lay.blocks = blocks;
  lay.part = partition_high_set(sets);
  lay.plan = derive_chaining_plan(lay.part, classify_case(lay.part));

  const Partition& part = lay.part;
  const ChainingPlan& plan = lay.plan;
  const size_t n = lay.n;

  const IndexList& hv = sets.high_set(Conditioning::Carrier);
  const IndexList& lv = sets.low_set(Conditioning::Carrier);
  const IndexList& l1 = sets.low_set(Conditioning::CarrierY1);
  const IndexList& l2 = sets.low_set(Conditioning::CarrierY2);
  const IndexList hv_c = complement_of(hv, n);

  lay.s_first = union_of(plan.I, union_of(part.G1, part.G12));
  lay.s_mid = plan.I;
  lay.s_last = union_of(plan.I, part.G2);
  lay.i_g2 = inter_of(plan.I, part.G2);

  lay.ups1 = diff_of(hv, l1);
  lay.ups2 = diff_of(hv, l2);
  lay.phi1 = diff_of(hv_c, l1);
  lay.phi2 = diff_of(hv_c, l2);
  lay.v_mid = diff_of(hv_c, lv);
  lay.v_low = lv;

  const IndexList& hxv = sets.high_set(Conditioning::PrefixV);
  const IndexList& hxvz = sets.high_set(Conditioning::PrefixVZ);
  const IndexList& lxv = sets.low_set(Conditioning::PrefixV);
  lay.x_seed = hxvz;
  lay.x_rand = diff_of(hxv, hxvz);
  lay.x_low = lxv;
  lay.x_mid = diff_of(complement_of(hxv, n), lxv);

  lay.pos_c1_in_c = positions_within(part.C1, part.C, "C1 in C");
  lay.pos_c12_in_c = positions_within(part.C12, part.C, "C12 in C");
  lay.pos_rlambda_in_ups1 = positions_within(plan.RLambda, lay.ups1, "RLambda in ups1");

  // The block-position writers must tile the carrier content set G u C.
  audit_cover({&part.C, &lay.s_first, &plan.R12, &plan.R12p, &plan.R1, &plan.R1p}, hv, n,
              "first block");
  audit_cover({&part.C, &lay.s_mid, &plan.R1, &plan.R1p, &plan.R2, &plan.R2p, &plan.R12,
               &plan.R12p, &plan.RS, &plan.RLambda},
              hv, n, "middle block");
  audit_cover({&part.C, &lay.s_last, &plan.R2, &plan.R2p, &plan.R12, &plan.R12p, &plan.RS,
               &plan.RLambda, &plan.filler},
              hv, n, "last block");

  // Forward decoding pins exactly the complement of L_{V|Y1}: the chained
  // repeat homes must exhaust G1 u G12.
  IndexList chain_homes = union_of(union_of(plan.R2, plan.R2p), union_of(plan.RS, plan.RLambda));
  if (chain_homes != union_of(part.G1, part.G12))
    throw DimensionMismatch("chained repeat homes do not tile G1 u G12");

  // Backward decoding must be able to pin all of G2 u G12 from successor blocks.
  IndexList back = union_of(union_of(plan.R1, plan.R1p), union_of(lay.i_g2, plan.RLambda));
  if (diff_of(union_of(part.G2, part.G12), back).size())
    throw DimensionMismatch("successor-block slots do not cover G2 u G12");

  return lay;
}

SessionKeys generate_keys(const SessionLayout& lay, Rng& rng) {
  SessionKeys keys;
  keys.theta = rng.bits(lay.part.C1.size());
  keys.gamma = rng.bits(lay.part.C12.size());
  keys.side1 = rng.bits(lay.ups1.size() + lay.blocks * lay.phi1.size());
  keys.side2 = rng.bits(lay.ups2.size() + lay.blocks * lay.phi2.size());
  keys.lambda_x = rng.bits(lay.x_seed.size());
  return keys;
}

MessageDims message_dimensions(const SessionLayout& lay) {
  MessageDims dims;
  dims.w_bits = lay.part.C.size();
  dims.s_bits.resize(lay.blocks);
  for (size_t i = 1; i <= lay.blocks; ++i) dims.s_bits[i - 1] = lay.s_home(i).size();
  dims.r_bits = lay.x_rand.size();
  return dims;
}

SessionInput random_session_input(const SessionLayout& lay, Rng& rng) {
  MessageDims dims = message_dimensions(lay);
  SessionInput input;
  for (size_t i = 0; i < lay.blocks; ++i) input.w.push_back(rng.bits(dims.w_bits));
  for (size_t i = 0; i < lay.blocks; ++i) input.s.push_back(rng.bits(dims.s_bits[i]));
  for (size_t i = 0; i < lay.blocks; ++i) input.r.push_back(rng.bits(dims.r_bits));
  return input;
}

void form_a_g(const SessionLayout& lay, size_t i, Bits& a, const Bits& w_i, const Bits& s_i,
              const Bits& theta_bar_next, const Bits& gamma_bar_next, const Bits& psi_prev,
              const Bits& gamma_prev, const Bits& pi_prev, const Bits& lambda_prev,
              const Bits& filler_bits) {
  const Partition& part = lay.part;
  const ChainingPlan& plan = lay.plan;
  const size_t last = lay.blocks;
  if (i < 1 || i > last) throw DimensionMismatch("block index out of range");
  require_len(a, lay.n, "carrier block");
  require_len(w_i, part.C.size(), "private word");
  require_len(s_i, lay.s_home(i).size(), "confidential word");
  require_len(theta_bar_next, part.C1.size(), "masked C1 chain word");
  require_len(gamma_bar_next, part.C12.size(), "masked C12 chain word");
  require_len(psi_prev, part.C2.size(), "C2 chain word");
  require_len(gamma_prev, part.C12.size(), "C12 chain word");
  require_len(pi_prev, lay.i_g2.size(), "repeated tail word");
  require_len(lambda_prev, plan.RLambda.size(), "carrier seed word");

  scatter(a, part.C, w_i);
  scatter(a, lay.s_home(i), s_i);
  scatter(a, plan.R12,
          xor_bits(slice_bits(gamma_prev, 0, plan.R12.size()),
                   slice_bits(gamma_bar_next, 0, plan.R12.size())));
  scatter(a, plan.R12p,
          xor_bits(slice_bits(psi_prev, plan.psi.first, plan.R12p.size()),
                   slice_bits(theta_bar_next, plan.theta_bar.first, plan.R12p.size())));
  if (i < last) {
    scatter(a, plan.R1, slice_bits(theta_bar_next, 0, plan.R1.size()));
    scatter(a, plan.R1p, slice_bits(gamma_bar_next, plan.gamma_bar.first, plan.R1p.size()));
  }
  if (i > 1) {
    scatter(a, plan.R2, slice_bits(psi_prev, 0, plan.R2.size()));
    scatter(a, plan.R2p, slice_bits(gamma_prev, plan.gamma.first, plan.R2p.size()));
    scatter(a, plan.RS, pi_prev);
    scatter(a, plan.RLambda, lambda_prev);
  }
  if (i == last) {
    require_len(filler_bits, plan.filler.size(), "last-block filler");
    scatter(a, plan.filler, filler_bits);
  }
}

Bits complete_carrier(const SessionLayout& lay, const Bits& a_content, Rng& rng) {
  require_len(a_content, lay.n, "carrier content block");
  std::vector<uint8_t> have(lay.n, 0);
  for (uint32_t j : lay.sets.high_set(Conditioning::Carrier)) have[j] = 1;
  std::vector<uint8_t> low(lay.n, 0);
  for (uint32_t j : lay.v_low) low[j] = 1;

  ScLaw law = carrier_law(lay.spec, lay.n);
  return sc_pass(law, [&](size_t j, double p0) -> int {
    if (have[j]) return a_content[j];
    return decide_bit(p0, low[j] ? FillRule::Argmax : FillRule::Sample, &rng);
  });
}

Bits channel_prefix(const SessionLayout& lay, const Bits& v_block, const Bits& r_i,
                    const Bits& lambda_x, Rng& rng, Bits* t_out) {
  require_len(v_block, lay.n, "carrier block");
  require_len(r_i, lay.x_rand.size(), "prefix randomizer");
  require_len(lambda_x, lay.x_seed.size(), "prefix seed");

  if (lay.spec.x_equals_v() && lay.x_seed.empty() && lay.x_rand.empty() && lay.x_mid.empty()) {
    if (t_out) *t_out = polar_transform(v_block);
    return v_block;
  }

  std::vector<int32_t> seed_pos(lay.n, -1), rand_pos(lay.n, -1);
  for (size_t k = 0; k < lay.x_seed.size(); ++k) seed_pos[lay.x_seed[k]] = static_cast<int32_t>(k);
  for (size_t k = 0; k < lay.x_rand.size(); ++k) rand_pos[lay.x_rand[k]] = static_cast<int32_t>(k);
  std::vector<uint8_t> low(lay.n, 0);
  for (uint32_t j : lay.x_low) low[j] = 1;

  ScLaw law = prefix_law(lay.spec, v_block);
  Bits t = sc_pass(law, [&](size_t j, double p0) -> int {
    if (seed_pos[j] >= 0) return lambda_x[seed_pos[j]];
    if (rand_pos[j] >= 0) return r_i[rand_pos[j]];
    return decide_bit(p0, low[j] ? FillRule::Argmax : FillRule::Sample, &rng);
  });
  if (t_out) *t_out = t;
  return polar_transform(t);
}

Session encode_session(const SessionLayout& lay, const SessionInput& input, const SessionKeys& keys,
                       Rng& rng, EncodeTrace* trace) {
  const size_t last = lay.blocks;
  const Partition& part = lay.part;
  MessageDims dims = message_dimensions(lay);
  if (input.w.size() != last || input.s.size() != last || input.r.size() != last)
    throw LengthMismatch("session input needs one word of each kind per block");
  require_len(keys.theta, part.C1.size(), "C1 key");
  require_len(keys.gamma, part.C12.size(), "C12 key");
  require_len(keys.side1, lay.ups1.size() + last * lay.phi1.size(), "receiver 1 side key");
  require_len(keys.side2, lay.ups2.size() + last * lay.phi2.size(), "receiver 2 side key");
  require_len(keys.lambda_x, lay.x_seed.size(), "prefix seed key");

  // Masked chain words for every block, derivable from the private words alone.
  std::vector<Bits> theta_bar(last), gamma_bar(last);
  for (size_t b = 0; b < last; ++b) {
    require_len(input.w[b], dims.w_bits, "private word");
    Bits theta(part.C1.size()), gamma(part.C12.size());
    for (size_t k = 0; k < theta.size(); ++k) theta[k] = input.w[b][lay.pos_c1_in_c[k]];
    for (size_t k = 0; k < gamma.size(); ++k) gamma[k] = input.w[b][lay.pos_c12_in_c[k]];
    theta_bar[b] = xor_bits(theta, keys.theta);
    gamma_bar[b] = xor_bits(gamma, keys.gamma);
  }

  Session out;
  Bits ups1_bits, ups2_bits;
  std::vector<Bits> phi1_blocks, phi2_blocks;
  Bits psi_prev = zeros(part.C2.size());
  Bits gamma_prev = zeros(part.C12.size());
  Bits pi_prev = zeros(lay.i_g2.size());
  Bits lambda_prev = zeros(lay.plan.RLambda.size());

  if (trace) {
    trace->theta_bar = theta_bar;
    trace->gamma_bar = gamma_bar;
  }

  for (size_t i = 1; i <= last; ++i) {
    Bits a(lay.n, 0);
    Bits tb_next = (i < last) ? theta_bar[i] : zeros(part.C1.size());
    Bits gb_next = (i < last) ? gamma_bar[i] : zeros(part.C12.size());
    Bits filler_bits = (i == last) ? rng.bits(lay.plan.filler.size()) : Bits{};
    form_a_g(lay, i, a, input.w[i - 1], input.s[i - 1], tb_next, gb_next, psi_prev, gamma_prev,
             pi_prev, lambda_prev, filler_bits);

    Bits psi_cur = gather(a, part.C2);
    Bits gamma_cur = gather(a, part.C12);
    Bits pi_cur = gather(a, lay.i_g2);
    Bits lambda_cur = gather(a, lay.plan.RLambda);

    Bits u = complete_carrier(lay, a, rng);
    Bits v = polar_transform(u);
    Bits t;
    Bits x = channel_prefix(lay, v, input.r[i - 1], keys.lambda_x, rng, &t);

    if (i == 1) ups1_bits = gather(u, lay.ups1);
    if (i == last) ups2_bits = gather(u, lay.ups2);
    phi1_blocks.push_back(gather(u, lay.phi1));
    phi2_blocks.push_back(gather(u, lay.phi2));
    out.x_blocks.push_back(x);

    if (trace) {
      trace->a.push_back(u);
      trace->t.push_back(t);
      trace->x.push_back(x);
      trace->psi.push_back(psi_cur);
      trace->gamma_plain.push_back(gamma_cur);
      trace->pi.push_back(pi_cur);
      trace->lambda.push_back(lambda_cur);
      if (i == last) trace->filler_bits = filler_bits;
    }

    psi_prev = psi_cur;
    gamma_prev = gamma_cur;
    pi_prev = pi_cur;
    lambda_prev = lambda_cur;
  }

  Bits side1 = ups1_bits;
  for (const Bits& phi : phi1_blocks) side1 = concat_bits(side1, phi);
  Bits side2 = ups2_bits;
  for (const Bits& phi : phi2_blocks) side2 = concat_bits(side2, phi);
  out.side_info1 = xor_bits(side1, keys.side1);
  out.side_info2 = xor_bits(side2, keys.side2);
  return out;
}

}  // namespace wbc

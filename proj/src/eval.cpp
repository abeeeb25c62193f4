#include "wbc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <thread>

#include "wbc/mathutil.hpp"

namespace wbc {
namespace {

constexpr double kLn2 = 0.6931471805599453094;

Bits zeros(size_t len) { return Bits(len, 0); }

uint32_t pack_bits(const Bits& b) {
  if (b.size() > 31) throw BudgetExceeded("bit word too wide to pack into a table index");
  uint32_t v = 0;
  for (uint8_t bit : b) v = (v << 1) | bit;
  return v;
}

// Mutual information of a dense joint table (unnormalized weights), bits.
double table_mi(const std::vector<double>& joint, size_t rows, size_t cols) {
  std::vector<double> pr(rows, 0.0), pc(cols, 0.0);
  double tot = 0.0;
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c) {
      double p = joint[r * cols + c];
      pr[r] += p;
      pc[c] += p;
      tot += p;
    }
  if (tot <= 0.0) return 0.0;
  double mi = 0.0;
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c) {
      double p = joint[r * cols + c];
      if (p > 0.0) mi += p / tot * std::log2(p * tot / (pr[r] * pc[c]));
    }
  return mi;
}

// Reads consecutive bit fields out of an enumeration counter.
struct BitCursor {
  uint64_t word = 0;
  size_t pos = 0;
  Bits take(size_t k) {
    Bits out(k);
    for (size_t i = 0; i < k; ++i) out[i] = static_cast<uint8_t>((word >> pos++) & 1u);
    return out;
  }
};

size_t checked_pow(size_t base, size_t exp, double limit, const char* what) {
  double v = std::pow(static_cast<double>(base), static_cast<double>(exp));
  if (v > limit) throw BudgetExceeded(std::string(what) + " would need " + std::to_string(v) +
                                      " table cells");
  size_t out = 1;
  for (size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

}  // namespace

PolarConstants polar_constants(size_t n, double beta) {
  if (n < 2) throw ConfigError("block length must be at least 2");
  if (!(beta > 0.0 && beta < 0.5)) throw ConfigError("beta must lie in (0, 1/2)");
  const double nn = static_cast<double>(n);
  PolarConstants c;
  c.delta_n = std::exp2(-std::pow(nn, beta));
  c.delta1 = std::sqrt(2.0 * nn * c.delta_n * kLn2);
  const double sqrt2 = std::sqrt(2.0);
  c.delta2 = 2.0 * nn *
             std::sqrt(2.0 * sqrt2 * c.delta1 * (2.0 * nn - std::log2(sqrt2 * c.delta1)) +
                       c.delta_n);
  const double root = std::sqrt(nn * c.delta_n * kLn2);
  c.delta_star = 2.0 * nn *
                     std::sqrt(4.0 * root * (2.0 * nn - std::log2(2.0 * root)) + c.delta_n) +
                 2.0 * root;
  c.delta_s = 2.0 * nn * c.delta_n + 2.0 * c.delta_star * (4.0 * nn - std::log2(c.delta_star));
  return c;
}

double reliability_bound(size_t n, double beta, size_t blocks) {
  PolarConstants c = polar_constants(n, beta);
  double pairs = 0.5 * static_cast<double>(blocks) * static_cast<double>(blocks + 1);
  return pairs * (static_cast<double>(n) * c.delta_n + 2.0 * c.delta_star);
}

ReliabilityPoint run_reliability_trials(const WiretapSpec& spec, const PolarizedSets& sets,
                                        size_t blocks, size_t trials, uint64_t seed,
                                        unsigned workers) {
  SessionLayout lay = make_layout(spec, sets, blocks);
  struct Tally {
    size_t rx1 = 0, rx2 = 0, session = 0;
  };

  auto run_one = [&](size_t t, Tally& tally) {
    Rng key_rng(derive_seed(seed, Stream::Keys, {t}));
    SessionKeys keys = generate_keys(lay, key_rng);
    Rng msg_rng(derive_seed(seed, Stream::Messages, {t}));
    SessionInput input = random_session_input(lay, msg_rng);
    Rng fill_rng(derive_seed(seed, Stream::CarrierFill, {t}));
    Session ses = encode_session(lay, input, keys, fill_rng);

    std::vector<Symbols> y1(blocks), y2(blocks);
    for (size_t b = 0; b < blocks; ++b) {
      Rng ch_rng(derive_seed(seed, Stream::ChannelNoise, {t, b}));
      BlockObservations obs = sample_outputs(spec, ses.x_blocks[b], ch_rng);
      y1[b] = std::move(obs.y1);
      y2[b] = std::move(obs.y2);
    }
    DecodeResult d1 = decode_rx1(lay, keys.theta, keys.gamma, keys.side1, y1, ses.side_info1);
    DecodeResult d2 = decode_rx2(lay, keys.theta, keys.gamma, keys.side2, y2, ses.side_info2);

    bool session_err = false;
    for (size_t b = 0; b < blocks; ++b) {
      bool e1 = d1.w[b] != input.w[b] || d1.s[b] != input.s[b];
      bool e2 = d2.w[b] != input.w[b] || d2.s[b] != input.s[b];
      tally.rx1 += e1;
      tally.rx2 += e2;
      session_err = session_err || e1 || e2;
    }
    tally.session += session_err;
  };

  Tally total;
  if (workers <= 1) {
    for (size_t t = 0; t < trials; ++t) run_one(t, total);
  } else {
    std::vector<Tally> parts(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (size_t t = w; t < trials; t += workers) run_one(t, parts[w]);
      });
    for (auto& th : pool) th.join();
    for (const Tally& p : parts) {
      total.rx1 += p.rx1;
      total.rx2 += p.rx2;
      total.session += p.session;
    }
  }

  ReliabilityPoint point;
  point.n = lay.n;
  point.blocks = blocks;
  point.trials = trials;
  point.rx1_block_errors = total.rx1;
  point.rx2_block_errors = total.rx2;
  point.session_errors = total.session;
  if (trials) {
    double p = static_cast<double>(total.session) / static_cast<double>(trials);
    point.session_error_rate = p;
    point.se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  }
  return point;
}

void enumerate_block_fills(const SessionLayout& lay, const Bits& a_content, const Bits& r_bits,
                           const Bits& lambda_x,
                           const std::function<void(const Bits&, const Bits&, double)>& visit) {
  const size_t n = lay.n;
  if (a_content.size() != n) throw LengthMismatch("carrier content block length differs from n");
  if (r_bits.size() != lay.x_rand.size()) throw LengthMismatch("prefix randomizer length is wrong");
  if (lambda_x.size() != lay.x_seed.size()) throw LengthMismatch("prefix seed length is wrong");

  std::vector<uint8_t> have(n, 0), vlow(n, 0), xlow(n, 0);
  for (uint32_t j : lay.sets.high_set(Conditioning::Carrier)) have[j] = 1;
  for (uint32_t j : lay.v_low) vlow[j] = 1;
  for (uint32_t j : lay.x_low) xlow[j] = 1;
  std::vector<int32_t> seed_pos(n, -1), rand_pos(n, -1);
  for (size_t k = 0; k < lay.x_seed.size(); ++k) seed_pos[lay.x_seed[k]] = static_cast<int32_t>(k);
  for (size_t k = 0; k < lay.x_rand.size(); ++k) rand_pos[lay.x_rand[k]] = static_cast<int32_t>(k);

  ScLaw vlaw = carrier_law(lay.spec, n);
  Bits u(n, 0), t(n, 0);

  std::function<void(const ScLaw&, size_t, double)> rec_t = [&](const ScLaw& xlaw, size_t j,
                                                                double w) {
    if (j == n) {
      visit(u, t, w);
      return;
    }
    if (seed_pos[j] >= 0) {
      t[j] = lambda_x[seed_pos[j]];
      rec_t(xlaw, j + 1, w);
      return;
    }
    if (rand_pos[j] >= 0) {
      t[j] = r_bits[rand_pos[j]];
      rec_t(xlaw, j + 1, w);
      return;
    }
    double p0 = sc_posterior(xlaw, j, Bits(t.begin(), t.begin() + j));
    if (xlow[j]) {
      t[j] = p0 >= 0.5 ? 0 : 1;
      rec_t(xlaw, j + 1, w);
      return;
    }
    if (p0 > 0.0) {
      t[j] = 0;
      rec_t(xlaw, j + 1, w * p0);
    }
    if (p0 < 1.0) {
      t[j] = 1;
      rec_t(xlaw, j + 1, w * (1.0 - p0));
    }
  };

  std::function<void(size_t, double)> rec_v = [&](size_t j, double w) {
    if (j == n) {
      ScLaw xlaw = prefix_law(lay.spec, polar_transform(u));
      rec_t(xlaw, 0, w);
      return;
    }
    if (have[j]) {
      u[j] = a_content[j];
      rec_v(j + 1, w);
      return;
    }
    double p0 = sc_posterior(vlaw, j, Bits(u.begin(), u.begin() + j));
    if (vlow[j]) {
      u[j] = p0 >= 0.5 ? 0 : 1;
      rec_v(j + 1, w);
      return;
    }
    if (p0 > 0.0) {
      u[j] = 0;
      rec_v(j + 1, w * p0);
    }
    if (p0 < 1.0) {
      u[j] = 1;
      rec_v(j + 1, w * (1.0 - p0));
    }
  };

  rec_v(0, 1.0);
}

void enumerate_sessions(const SessionLayout& lay, const EnumBudget& budget,
                        const std::function<void(const SessionRecord&)>& visit) {
  const size_t L = lay.blocks;
  const Partition& part = lay.part;
  MessageDims dims = message_dimensions(lay);

  size_t outer = part.C1.size() + part.C12.size() + lay.x_seed.size() + L * dims.w_bits +
                 lay.plan.filler.size() + L * dims.r_bits;
  for (size_t b = 0; b < L; ++b) outer += dims.s_bits[b];
  size_t branch_bits = outer + L * (lay.v_mid.size() + lay.x_mid.size());
  if (branch_bits > budget.max_branch_bits)
    throw BudgetExceeded("session enumeration would branch over 2^" +
                         std::to_string(branch_bits) + " paths");

  const uint64_t combos = uint64_t{1} << outer;
  const double base_weight = std::exp2(-static_cast<double>(outer));

  for (uint64_t m = 0; m < combos; ++m) {
    BitCursor cur{m, 0};
    SessionRecord rec;
    rec.key_theta = cur.take(part.C1.size());
    rec.key_gamma = cur.take(part.C12.size());
    rec.lambda_x = cur.take(lay.x_seed.size());
    for (size_t b = 0; b < L; ++b) rec.w.push_back(cur.take(dims.w_bits));
    for (size_t b = 0; b < L; ++b) rec.s.push_back(cur.take(dims.s_bits[b]));
    Bits filler = cur.take(lay.plan.filler.size());
    std::vector<Bits> r_blocks;
    for (size_t b = 0; b < L; ++b) r_blocks.push_back(cur.take(dims.r_bits));

    // Masked chain words, then the same forward bookkeeping as the encoder.
    std::vector<Bits> theta_bar(L), gamma_bar(L);
    for (size_t b = 0; b < L; ++b) {
      Bits theta(part.C1.size()), gamma(part.C12.size());
      for (size_t k = 0; k < theta.size(); ++k) theta[k] = rec.w[b][lay.pos_c1_in_c[k]];
      for (size_t k = 0; k < gamma.size(); ++k) gamma[k] = rec.w[b][lay.pos_c12_in_c[k]];
      theta_bar[b] = xor_bits(theta, rec.key_theta);
      gamma_bar[b] = xor_bits(gamma, rec.key_gamma);
    }

    std::vector<Bits> content(L);
    Bits psi_prev = zeros(part.C2.size());
    Bits gamma_prev = zeros(part.C12.size());
    Bits pi_prev = zeros(lay.i_g2.size());
    Bits lambda_prev = zeros(lay.plan.RLambda.size());
    for (size_t i = 1; i <= L; ++i) {
      Bits a(lay.n, 0);
      Bits tb_next = (i < L) ? theta_bar[i] : zeros(part.C1.size());
      Bits gb_next = (i < L) ? gamma_bar[i] : zeros(part.C12.size());
      form_a_g(lay, i, a, rec.w[i - 1], rec.s[i - 1], tb_next, gb_next, psi_prev, gamma_prev,
               pi_prev, lambda_prev, (i == L) ? filler : Bits{});
      rec.psi.push_back(gather(a, part.C2));
      rec.gamma_plain.push_back(gather(a, part.C12));
      rec.pi.push_back(gather(a, lay.i_g2));
      rec.lambda.push_back(gather(a, lay.plan.RLambda));
      psi_prev = rec.psi.back();
      gamma_prev = rec.gamma_plain.back();
      pi_prev = rec.pi.back();
      lambda_prev = rec.lambda.back();
      content[i - 1] = a;
    }

    // The sampled fills are conditionally independent across blocks.
    struct BlockLeaf {
      Bits u, t, x;
      double w;
    };
    std::vector<std::vector<BlockLeaf>> leaves(L);
    for (size_t b = 0; b < L; ++b)
      enumerate_block_fills(lay, content[b], r_blocks[b], rec.lambda_x,
                            [&](const Bits& u, const Bits& t, double w) {
                              leaves[b].push_back({u, t, polar_transform(t), w});
                            });

    rec.u.assign(L, Bits());
    rec.t.assign(L, Bits());
    rec.x.assign(L, Bits());
    std::function<void(size_t, double)> rec_blocks = [&](size_t b, double w) {
      if (b == L) {
        rec.weight = w;
        visit(rec);
        return;
      }
      for (const BlockLeaf& leaf : leaves[b]) {
        rec.u[b] = leaf.u;
        rec.t[b] = leaf.t;
        rec.x[b] = leaf.x;
        rec_blocks(b + 1, w * leaf.w);
      }
    };
    rec_blocks(0, base_weight);
  }
}

LeakageResult exact_leakage(const SessionLayout& lay, const EnumBudget& budget) {
  const size_t L = lay.blocks;
  MessageDims dims = message_dimensions(lay);
  size_t s_bits = 0;
  for (size_t b = 0; b < L; ++b) s_bits += dims.s_bits[b];
  if (s_bits > 25) throw BudgetExceeded("too many confidential bits to tabulate exactly");

  const size_t z_alph = lay.spec.z.alphabet;
  const size_t rows = size_t{1} << s_bits;
  const size_t z_cells = checked_pow(z_alph, lay.n * L,
                                     budget.max_table_cells / static_cast<double>(rows),
                                     "exact leakage");

  std::vector<double> joint(rows * z_cells, 0.0);
  enumerate_sessions(lay, budget, [&](const SessionRecord& rec) {
    uint64_t s_idx = 0;
    for (const Bits& word : rec.s)
      for (uint8_t bit : word) s_idx = (s_idx << 1) | bit;

    // Per-position output rows for this session's channel inputs.
    std::vector<const std::vector<double>*> row(lay.n * L);
    for (size_t b = 0; b < L; ++b)
      for (size_t j = 0; j < lay.n; ++j) row[b * lay.n + j] = &lay.spec.z.row[rec.x[b][j]];

    double* dst = joint.data() + s_idx * z_cells;
    for (size_t z = 0; z < z_cells; ++z) {
      double prob = rec.weight;
      size_t rest = z;
      for (size_t pos = lay.n * L; pos-- > 0 && prob > 0.0;) {
        prob *= (*row[pos])[rest % z_alph];
        rest /= z_alph;
      }
      dst[z] += prob;
    }
  });

  LeakageResult out;
  out.s_bits = s_bits;
  out.z_cells = z_cells;
  out.mi_bits = table_mi(joint, rows, z_cells);
  return out;
}

double exact_chain_separation_cmi(const SessionLayout& lay, const EnumBudget& budget) {
  if (lay.blocks != 2)
    throw ConfigError("the chain separation check is defined for two-block sessions");
  const size_t n = lay.n;
  const size_t z_alph = lay.spec.z.alphabet;
  const size_t z_cells = checked_pow(z_alph, n, budget.max_table_cells, "chain separation");

  // Joint over the packed tuple [s1, z1 | z2 | s2, pi1, lam1, psi1, gam1, lamx, w12].
  using Key = std::vector<uint32_t>;
  std::map<Key, double> joint;

  enumerate_sessions(lay, budget, [&](const SessionRecord& rec) {
    Bits theta2(lay.part.C1.size()), gamma2(lay.part.C12.size());
    for (size_t k = 0; k < theta2.size(); ++k) theta2[k] = rec.w[1][lay.pos_c1_in_c[k]];
    for (size_t k = 0; k < gamma2.size(); ++k) gamma2[k] = rec.w[1][lay.pos_c12_in_c[k]];

    Key cond = {pack_bits(rec.s[1]),        pack_bits(rec.pi[0]),
                pack_bits(rec.lambda[0]),   pack_bits(rec.psi[0]),
                pack_bits(rec.gamma_plain[0]), pack_bits(rec.lambda_x),
                pack_bits(concat_bits(theta2, gamma2))};
    uint32_t s1 = pack_bits(rec.s[0]);

    std::array<std::vector<double>, 2> zp;  // per-block z-sequence likelihoods
    for (size_t b = 0; b < 2; ++b) {
      zp[b].assign(z_cells, 0.0);
      for (size_t z = 0; z < z_cells; ++z) {
        double prob = 1.0;
        size_t rest = z;
        for (size_t pos = n; pos-- > 0 && prob > 0.0;) {
          prob *= lay.spec.z.row[rec.x[b][pos]][rest % z_alph];
          rest /= z_alph;
        }
        zp[b][z] = prob;
      }
    }

    for (size_t z1 = 0; z1 < z_cells; ++z1) {
      if (zp[0][z1] == 0.0) continue;
      for (size_t z2 = 0; z2 < z_cells; ++z2) {
        double p = rec.weight * zp[0][z1] * zp[1][z2];
        if (p == 0.0) continue;
        Key key;
        key.reserve(cond.size() + 3);
        key.push_back(s1);
        key.push_back(static_cast<uint32_t>(z1));
        key.push_back(static_cast<uint32_t>(z2));
        key.insert(key.end(), cond.begin(), cond.end());
        joint[key] += p;
      }
    }
  });

  // I(A;B|C) with A = (s1, z1), B = z2, C = the rest.
  std::map<Key, double> p_ac, p_bc, p_c;
  for (const auto& [key, p] : joint) {
    Key a(key.begin(), key.begin() + 2);
    Key b(key.begin() + 2, key.begin() + 3);
    Key c(key.begin() + 3, key.end());
    Key ac = a;
    ac.insert(ac.end(), c.begin(), c.end());
    Key bc = b;
    bc.insert(bc.end(), c.begin(), c.end());
    p_ac[ac] += p;
    p_bc[bc] += p;
    p_c[c] += p;
  }
  double cmi = 0.0;
  for (const auto& [key, p] : joint) {
    Key a(key.begin(), key.begin() + 2);
    Key b(key.begin() + 2, key.begin() + 3);
    Key c(key.begin() + 3, key.end());
    Key ac = a;
    ac.insert(ac.end(), c.begin(), c.end());
    Key bc = b;
    bc.insert(bc.end(), c.begin(), c.end());
    cmi += p * std::log2(p * p_c[c] / (p_ac[ac] * p_bc[bc]));
  }
  return cmi;
}

IndependenceReport chain_mask_independence(const SessionLayout& lay, const EnumBudget& budget) {
  const size_t L = lay.blocks;
  const Partition& part = lay.part;
  MessageDims dims = message_dimensions(lay);
  size_t outer = L * dims.w_bits + part.C1.size() + part.C12.size();
  if (outer > budget.max_branch_bits)
    throw BudgetExceeded("mask independence enumeration would branch over 2^" +
                         std::to_string(outer) + " paths");

  const size_t t_rows = size_t{1} << part.C1.size();
  const size_t g_rows = size_t{1} << part.C12.size();
  std::vector<std::vector<double>> theta_joint(L, std::vector<double>(t_rows * t_rows, 0.0));
  std::vector<std::vector<double>> gamma_joint(L, std::vector<double>(g_rows * g_rows, 0.0));

  SessionKeys keys;
  keys.side1 = zeros(lay.ups1.size() + L * lay.phi1.size());
  keys.side2 = zeros(lay.ups2.size() + L * lay.phi2.size());
  keys.lambda_x = zeros(lay.x_seed.size());

  SessionInput input;
  for (size_t b = 0; b < L; ++b) {
    input.s.push_back(zeros(dims.s_bits[b]));
    input.r.push_back(zeros(dims.r_bits));
  }
  input.w.assign(L, Bits());

  const uint64_t combos = uint64_t{1} << outer;
  const double w_each = std::exp2(-static_cast<double>(outer));
  for (uint64_t m = 0; m < combos; ++m) {
    BitCursor cur{m, 0};
    for (size_t b = 0; b < L; ++b) input.w[b] = cur.take(dims.w_bits);
    keys.theta = cur.take(part.C1.size());
    keys.gamma = cur.take(part.C12.size());

    Rng fill_rng(1);  // fills do not feed the masked words; keep them constant
    EncodeTrace trace;
    encode_session(lay, input, keys, fill_rng, &trace);

    for (size_t b = 0; b < L; ++b) {
      Bits theta(part.C1.size()), gamma(part.C12.size());
      for (size_t k = 0; k < theta.size(); ++k) theta[k] = input.w[b][lay.pos_c1_in_c[k]];
      for (size_t k = 0; k < gamma.size(); ++k) gamma[k] = input.w[b][lay.pos_c12_in_c[k]];
      theta_joint[b][pack_bits(theta) * t_rows + pack_bits(trace.theta_bar[b])] += w_each;
      gamma_joint[b][pack_bits(gamma) * g_rows + pack_bits(trace.gamma_bar[b])] += w_each;
    }
  }

  IndependenceReport rep;
  for (size_t b = 0; b < L; ++b) {
    rep.max_theta_mi = std::max(rep.max_theta_mi, table_mi(theta_joint[b], t_rows, t_rows));
    rep.max_gamma_mi = std::max(rep.max_gamma_mi, table_mi(gamma_joint[b], g_rows, g_rows));
  }
  return rep;
}

TvReport carrier_prefix_tv(const SessionLayout& lay, const EnumBudget& budget) {
  const size_t n = lay.n;
  const IndexList& hv = lay.sets.high_set(Conditioning::Carrier);
  size_t outer = hv.size() + lay.x_seed.size() + lay.x_rand.size();
  size_t branch_bits = outer + lay.v_mid.size() + lay.x_mid.size();
  if (branch_bits > budget.max_branch_bits)
    throw BudgetExceeded("block law enumeration would branch over 2^" +
                         std::to_string(branch_bits) + " paths");
  if (std::exp2(2.0 * static_cast<double>(n)) > budget.max_table_cells)
    throw BudgetExceeded("block law table would be too large");

  const size_t cells = size_t{1} << n;
  std::vector<double> q(cells * cells, 0.0);

  const uint64_t combos = uint64_t{1} << outer;
  const double w_each = std::exp2(-static_cast<double>(outer));
  for (uint64_t m = 0; m < combos; ++m) {
    BitCursor cur{m, 0};
    Bits a_content(n, 0);
    scatter(a_content, hv, cur.take(hv.size()));
    Bits lambda_x = cur.take(lay.x_seed.size());
    Bits r_bits = cur.take(lay.x_rand.size());
    enumerate_block_fills(lay, a_content, r_bits, lambda_x,
                          [&](const Bits& u, const Bits& t, double w) {
                            q[pack_bits(u) * cells + pack_bits(t)] += w_each * w;
                          });
  }

  double tv = 0.0;
  for (size_t ai = 0; ai < cells; ++ai) {
    Bits u(n), t(n);
    for (size_t j = 0; j < n; ++j) u[j] = static_cast<uint8_t>((ai >> (n - 1 - j)) & 1u);
    Bits v = polar_transform(u);
    for (size_t ti = 0; ti < cells; ++ti) {
      for (size_t j = 0; j < n; ++j) t[j] = static_cast<uint8_t>((ti >> (n - 1 - j)) & 1u);
      Bits x = polar_transform(t);
      double p = 1.0;
      for (size_t j = 0; j < n; ++j) p *= lay.spec.p_vx(v[j], x[j]);
      tv += std::abs(q[ai * cells + ti] - p);
    }
  }

  TvReport rep;
  rep.n = n;
  rep.tv = 0.5 * tv;
  rep.tv_per_bit = rep.tv / static_cast<double>(n);
  return rep;
}

double exact_hidden_mi(const SessionLayout& lay, const EnumBudget& budget) {
  const size_t n = lay.n;
  const IndexList& hv = lay.sets.high_set(Conditioning::Carrier);
  const IndexList& g = lay.part.G;
  size_t hidden_bits = g.size() + lay.x_seed.size();
  if (hidden_bits > 25) throw BudgetExceeded("too many hidden bits to tabulate exactly");
  size_t outer = hv.size() + lay.x_seed.size() + lay.x_rand.size();
  size_t branch_bits = outer + lay.v_mid.size() + lay.x_mid.size();
  if (branch_bits > budget.max_branch_bits)
    throw BudgetExceeded("hidden-content enumeration would branch over 2^" +
                         std::to_string(branch_bits) + " paths");

  const size_t z_alph = lay.spec.z.alphabet;
  const size_t rows = size_t{1} << hidden_bits;
  const size_t z_cells =
      checked_pow(z_alph, n, budget.max_table_cells / static_cast<double>(rows), "hidden-content MI");

  std::vector<double> joint(rows * z_cells, 0.0);
  const uint64_t combos = uint64_t{1} << outer;
  const double w_each = std::exp2(-static_cast<double>(outer));
  for (uint64_t m = 0; m < combos; ++m) {
    BitCursor cur{m, 0};
    Bits a_content(n, 0);
    scatter(a_content, hv, cur.take(hv.size()));
    Bits lambda_x = cur.take(lay.x_seed.size());
    Bits r_bits = cur.take(lay.x_rand.size());
    enumerate_block_fills(lay, a_content, r_bits, lambda_x,
                          [&](const Bits& u, const Bits& t, double w) {
                            uint32_t hidden = pack_bits(concat_bits(gather(u, g), gather(t, lay.x_seed)));
                            Bits x = polar_transform(t);
                            double* dst = joint.data() + size_t{hidden} * z_cells;
                            for (size_t z = 0; z < z_cells; ++z) {
                              double prob = w_each * w;
                              size_t rest = z;
                              for (size_t pos = n; pos-- > 0 && prob > 0.0;) {
                                prob *= lay.spec.z.row[x[pos]][rest % z_alph];
                                rest /= z_alph;
                              }
                              dst[z] += prob;
                            }
                          });
  }
  return table_mi(joint, rows, z_cells);
}

std::vector<RateScanRow> rate_convergence_scan(const WiretapSpec& spec,
                                               const std::vector<size_t>& lengths, double beta,
                                               size_t blocks, SetMethod method, size_t samples,
                                               uint64_t seed, unsigned workers) {
  std::vector<RateScanRow> rows;
  for (size_t n : lengths) {
    EntropyProfile profile = compute_entropies(spec, n, method, samples, seed, workers);
    PolarizedSets sets = build_polarized_sets(profile, beta, spec.content_hash());
    Partition part = partition_high_set(sets);
    ChainingPlan plan = derive_chaining_plan(part, classify_case(part));
    RateScanRow row;
    row.n = n;
    row.label = plan.label;
    row.rates = rate_report(plan, sets, blocks);
    rows.push_back(std::move(row));
  }
  return rows;
}

MiEstimate estimate_leakage_mi(const SessionLayout& lay, size_t samples, uint64_t seed,
                               size_t bootstrap_reps, double ci_level) {
  const size_t L = lay.blocks;
  MessageDims dims = message_dimensions(lay);
  size_t s_bits = 0;
  for (size_t b = 0; b < L; ++b) s_bits += dims.s_bits[b];
  if (s_bits > 25) throw BudgetExceeded("too many confidential bits to tabulate");
  const size_t z_alph = lay.spec.z.alphabet;
  const size_t rows = size_t{1} << s_bits;
  const size_t z_cells = checked_pow(z_alph, lay.n * L, 5e7 / static_cast<double>(rows),
                                     "leakage estimation");

  std::vector<uint64_t> counts(rows * z_cells, 0);
  for (size_t tr = 0; tr < samples; ++tr) {
    Rng key_rng(derive_seed(seed, Stream::Estimator, {tr, 0}));
    SessionKeys keys = generate_keys(lay, key_rng);
    Rng msg_rng(derive_seed(seed, Stream::Estimator, {tr, 1}));
    SessionInput input = random_session_input(lay, msg_rng);
    Rng fill_rng(derive_seed(seed, Stream::Estimator, {tr, 2}));
    Session ses = encode_session(lay, input, keys, fill_rng);

    uint64_t s_idx = 0;
    for (const Bits& word : input.s)
      for (uint8_t bit : word) s_idx = (s_idx << 1) | bit;
    uint64_t z_idx = 0;
    Rng ch_rng(derive_seed(seed, Stream::Estimator, {tr, 3}));
    for (size_t b = 0; b < L; ++b) {
      BlockObservations obs = sample_outputs(lay.spec, ses.x_blocks[b], ch_rng);
      for (uint8_t sym : obs.z) z_idx = z_idx * z_alph + sym;
    }
    ++counts[s_idx * z_cells + z_idx];
  }

  const double nd = static_cast<double>(samples);
  auto corrected_mi = [&](const std::vector<uint64_t>& table) {
    std::vector<double> ps(rows, 0.0), pz(z_cells, 0.0);
    size_t m_s = 0, m_z = 0, m_sz = 0;
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < z_cells; ++c) {
        uint64_t v = table[r * z_cells + c];
        if (!v) continue;
        ps[r] += static_cast<double>(v);
        pz[c] += static_cast<double>(v);
        ++m_sz;
      }
    double mi = 0.0;
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < z_cells; ++c) {
        uint64_t v = table[r * z_cells + c];
        if (!v) continue;
        double p = static_cast<double>(v) / nd;
        mi += p * std::log2(p * nd * nd / (ps[r] * pz[c]));
      }
    for (double v : ps) m_s += v > 0.0;
    for (double v : pz) m_z += v > 0.0;
    double correction = (static_cast<double>(m_s) - 1.0 + static_cast<double>(m_z) - 1.0 -
                         (static_cast<double>(m_sz) - 1.0)) /
                        (2.0 * nd * kLn2);
    return std::pair<double, double>{mi, mi + correction};
  };

  MiEstimate est;
  est.samples = samples;
  auto [plugin, corrected] = corrected_mi(counts);
  est.mi_plugin = plugin;
  est.mi_corrected = corrected;

  if (bootstrap_reps == 0) {
    est.ci_lo = est.ci_hi = corrected;
    return est;
  }

  // Nonzero cells of the empirical table; resamples are multinomial draws
  // realized as sequential conditional binomials.
  std::vector<std::pair<size_t, uint64_t>> cells;
  for (size_t i = 0; i < counts.size(); ++i)
    if (counts[i]) cells.emplace_back(i, counts[i]);

  std::vector<double> reps;
  reps.reserve(bootstrap_reps);
  std::vector<uint64_t> resample(counts.size(), 0);
  for (size_t b = 0; b < bootstrap_reps; ++b) {
    std::mt19937_64 eng(derive_seed(seed, Stream::Bootstrap, {b}));
    std::fill(resample.begin(), resample.end(), 0);
    uint64_t remaining = samples;
    uint64_t mass_left = samples;
    for (const auto& [idx, cnt] : cells) {
      if (!remaining) break;
      double p = static_cast<double>(cnt) / static_cast<double>(mass_left);
      uint64_t draw;
      if (p >= 1.0) {
        draw = remaining;
      } else {
        std::binomial_distribution<uint64_t> dist(remaining, p);
        draw = dist(eng);
      }
      resample[idx] = draw;
      remaining -= draw;
      mass_left -= cnt;
    }
    reps.push_back(corrected_mi(resample).second);
  }
  std::sort(reps.begin(), reps.end());
  double alpha = (1.0 - ci_level) / 2.0;
  size_t lo = static_cast<size_t>(std::floor(alpha * static_cast<double>(reps.size() - 1)));
  size_t hi = static_cast<size_t>(std::ceil((1.0 - alpha) * static_cast<double>(reps.size() - 1)));
  // Resampling doubles the coincidence bias, so replicate locations are not
  // trustworthy; keep only their spread, centered on the corrected estimate.
  double center = reps[(reps.size() - 1) / 2];
  est.ci_lo = est.mi_corrected - (reps[hi] - center);
  est.ci_hi = est.mi_corrected + (center - reps[lo]);
  return est;
}

}  // namespace wbc

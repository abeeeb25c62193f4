#include "wbc/sets.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "wbc/errors.hpp"
#include "wbc/mathutil.hpp"
#include "wbc/polar.hpp"

namespace wbc {

const char* to_string(SetMethod m) {
  switch (m) {
    case SetMethod::ExactBec: return "exact_bec";
    case SetMethod::MonteCarlo: return "monte_carlo";
    case SetMethod::Enumeration: return "enumeration";
  }
  return "?";
}

SetMethod set_method_from_string(const std::string& s) {
  if (s == "exact_bec") return SetMethod::ExactBec;
  if (s == "monte_carlo") return SetMethod::MonteCarlo;
  if (s == "enumeration") return SetMethod::Enumeration;
  throw ConfigError("unknown set construction method: " + s);
}

namespace {

// ---------------------------------------------------------------------------
// exact_bec: closed-form erasure-parameter recursion, natural index order.

void erasure_rec(double e, size_t lo, size_t m, std::vector<double>& out) {
  if (m == 1) {
    out[lo] = e;
    return;
  }
  erasure_rec(2.0 * e - e * e, lo, m / 2, out);
  erasure_rec(e * e, lo + m / 2, m / 2, out);
}

std::vector<double> erasure_vector(double eps, size_t n) {
  std::vector<double> out(n);
  erasure_rec(eps, 0, n, out);
  return out;
}

EntropyProfile exact_bec_profile(const WiretapSpec& spec, size_t n) {
  bool uniform_v = spec.p_v(0) == 0.5 && spec.p_v(1) == 0.5;
  if (!uniform_v || !spec.x_equals_v() || !spec.y1.is_erasure() || !spec.y2.is_erasure() ||
      !spec.z.is_erasure()) {
    throw MethodUnsupported(
        "exact_bec needs uniform V, X = V, and erasure output laws on all three receivers");
  }
  EntropyProfile p;
  p.n = n;
  p.method = SetMethod::ExactBec;
  p.h[size_t(Conditioning::Carrier)].assign(n, 1.0);
  p.h[size_t(Conditioning::CarrierY1)] = erasure_vector(spec.y1.erasure_rate(), n);
  p.h[size_t(Conditioning::CarrierY2)] = erasure_vector(spec.y2.erasure_rate(), n);
  p.h[size_t(Conditioning::CarrierZ)] = erasure_vector(spec.z.erasure_rate(), n);
  p.h[size_t(Conditioning::PrefixV)].assign(n, 0.0);
  p.h[size_t(Conditioning::PrefixVZ)].assign(n, 0.0);
  for (auto& v : p.se) v.assign(n, 0.0);
  return p;
}

// ---------------------------------------------------------------------------
// Enumeration: exact chain-rule entropies by brute force over side sequences.
// Each conditioning is described by the per-symbol joint P(bit, side symbol);
// symbols are iid so one table serves every position.

struct SymbolJoint {
  size_t side_alphabet = 0;
  std::vector<std::array<double, 2>> p;  // p[side][bit]
};

SymbolJoint symbol_joint(const WiretapSpec& spec, Conditioning c) {
  SymbolJoint j;
  switch (c) {
    case Conditioning::Carrier:
      j.side_alphabet = 1;
      j.p = {{spec.p_v(0), spec.p_v(1)}};
      break;
    case Conditioning::CarrierY1:
    case Conditioning::CarrierY2:
    case Conditioning::CarrierZ: {
      const OutputLaw& law = c == Conditioning::CarrierY1 ? spec.y1
                             : c == Conditioning::CarrierY2 ? spec.y2
                                                            : spec.z;
      j.side_alphabet = law.alphabet;
      j.p.resize(law.alphabet);
      for (uint8_t y = 0; y < law.alphabet; ++y) {
        j.p[y] = {spec.p_v(0) * spec.out_given_v(law, y, 0),
                  spec.p_v(1) * spec.out_given_v(law, y, 1)};
      }
      break;
    }
    case Conditioning::PrefixV:
      j.side_alphabet = 2;
      j.p = {{spec.p_vx(0, 0), spec.p_vx(0, 1)}, {spec.p_vx(1, 0), spec.p_vx(1, 1)}};
      break;
    case Conditioning::PrefixVZ: {
      j.side_alphabet = 2 * spec.z.alphabet;  // side = (v, z)
      j.p.resize(j.side_alphabet);
      for (int v = 0; v < 2; ++v) {
        for (uint8_t zz = 0; zz < spec.z.alphabet; ++zz) {
          j.p[v * spec.z.alphabet + zz] = {spec.p_vx(v, 0) * spec.z.row[0][zz],
                                           spec.p_vx(v, 1) * spec.z.row[1][zz]};
        }
      }
      break;
    }
  }
  return j;
}

struct EnumWorkspace {
  size_t n = 0;
  std::vector<uint32_t> perm;                     // u-index -> source-index via the involution
  std::vector<std::vector<double>> level;         // level[d]: partial products over source prefixes
  std::vector<double> q, fold;                    // leaf buffers in u-order
  std::vector<double> acc;                        // acc[j] = H(U^{1:j} | S^n)
};

void enum_leaf(EnumWorkspace& ws) {
  size_t n = ws.n;
  const std::vector<double>& t = ws.level[n];
  double tot = 0.0;
  for (double v : t) tot += v;
  if (tot <= 0.0) return;
  std::vector<double>& q = ws.q;
  for (size_t u = 0; u < q.size(); ++u) q[u] = t[ws.perm[u]];
  // fold away the last u-bit repeatedly; at width 2^j the buckets are u^{1:j}
  std::vector<double>& f = ws.fold;
  f = q;
  for (size_t j = n; j >= 1; --j) {
    double hj = 0.0;
    size_t width = size_t{1} << j;
    for (size_t k = 0; k < width; ++k) {
      if (f[k] > 0.0) hj -= f[k] * std::log2(f[k] / tot);
    }
    ws.acc[j] += hj;
    if (j > 1) {
      for (size_t k = 0; k < width / 2; ++k) f[k] = f[2 * k] + f[2 * k + 1];
    }
  }
}

void enum_rec(EnumWorkspace& ws, const SymbolJoint& joint, const std::vector<uint8_t>& live_sides,
              size_t depth) {
  if (depth == ws.n) {
    enum_leaf(ws);
    return;
  }
  const std::vector<double>& cur = ws.level[depth];
  std::vector<double>& next = ws.level[depth + 1];
  for (uint8_t s : live_sides) {
    const auto& ps = joint.p[s];
    for (size_t k = 0; k < cur.size(); ++k) {
      next[2 * k] = cur[k] * ps[0];
      next[2 * k + 1] = cur[k] * ps[1];
    }
    enum_rec(ws, joint, live_sides, depth + 1);
  }
}

std::vector<double> enumerate_chain_entropies(const WiretapSpec& spec, Conditioning c, size_t n) {
  SymbolJoint joint = symbol_joint(spec, c);
  std::vector<uint8_t> live;
  for (size_t s = 0; s < joint.side_alphabet; ++s) {
    if (joint.p[s][0] + joint.p[s][1] > 0.0) live.push_back(static_cast<uint8_t>(s));
  }
  double leaves = std::pow(static_cast<double>(std::max<size_t>(live.size(), 1)), static_cast<double>(n));
  if (n > 16 || leaves * static_cast<double>(size_t{1} << n) > 1e10) {
    throw BudgetExceeded("enumeration too large for this block length / alphabet");
  }
  EnumWorkspace ws;
  ws.n = n;
  ws.perm.resize(size_t{1} << n);
  for (size_t u = 0; u < ws.perm.size(); ++u) {
    Bits ub(n);
    for (size_t i = 0; i < n; ++i) ub[i] = (u >> (n - 1 - i)) & 1;
    Bits vb = polar_transform(ub);
    uint32_t vi = 0;
    for (size_t i = 0; i < n; ++i) vi = (vi << 1) | vb[i];
    ws.perm[u] = vi;
  }
  ws.level.resize(n + 1);
  for (size_t d = 0; d <= n; ++d) ws.level[d].assign(size_t{1} << d, 0.0);
  ws.level[0][0] = 1.0;
  ws.q.assign(size_t{1} << n, 0.0);
  ws.fold.assign(size_t{1} << n, 0.0);
  ws.acc.assign(n + 1, 0.0);
  enum_rec(ws, joint, live, 0);
  std::vector<double> out(n);
  for (size_t j = 1; j <= n; ++j) out[j - 1] = ws.acc[j] - ws.acc[j - 1];
  return out;
}

EntropyProfile enumeration_profile(const WiretapSpec& spec, size_t n) {
  EntropyProfile p;
  p.n = n;
  p.method = SetMethod::Enumeration;
  for (size_t c = 0; c < kConditionings; ++c) {
    p.h[c] = enumerate_chain_entropies(spec, static_cast<Conditioning>(c), n);
    p.se[c].assign(n, 0.0);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Monte Carlo: -log2 posterior of the realized bit, one SC pass per sample.

struct McSums {
  std::vector<MeanAccumulator> acc;  // per index
};

void mc_one_sample(const WiretapSpec& spec, size_t n, Conditioning c, Rng& rng, McSums& sums) {
  // Draw the single-letter tuples for the block.
  Bits v(n), x(n);
  Symbols y1(n), y2(n), z(n);
  for (size_t i = 0; i < n; ++i) {
    SymbolDraw d = sample_symbols(spec, rng);
    v[i] = static_cast<uint8_t>(d.v);
    x[i] = static_cast<uint8_t>(d.x);
    y1[i] = d.y1;
    y2[i] = d.y2;
    z[i] = d.z;
  }
  ScLaw law;
  Bits source;
  switch (c) {
    case Conditioning::Carrier: law = carrier_law(spec, n); source = v; break;
    case Conditioning::CarrierY1: law = carrier_law_with_output(spec, spec.y1, y1); source = v; break;
    case Conditioning::CarrierY2: law = carrier_law_with_output(spec, spec.y2, y2); source = v; break;
    case Conditioning::CarrierZ: law = carrier_law_with_output(spec, spec.z, z); source = v; break;
    case Conditioning::PrefixV: law = prefix_law(spec, v); source = x; break;
    case Conditioning::PrefixVZ: law = prefix_law_with_output(spec, v, z); source = x; break;
  }
  Bits u = polar_transform(source);
  sc_pass(law, [&](size_t j, double p0) {
    double p = u[j] == 0 ? p0 : 1.0 - p0;
    double cost = p > 0.0 ? -std::log2(p) : 1074.0;  // smallest double ~ 2^-1074
    sums.acc[j].add(cost);
    return static_cast<int>(u[j]);
  });
}

EntropyProfile monte_carlo_profile(const WiretapSpec& spec, size_t n, size_t samples, uint64_t seed,
                                   unsigned workers) {
  if (samples == 0) throw ConfigError("monte_carlo needs a positive sample count");
  if (workers == 0) workers = 1;
  EntropyProfile p;
  p.n = n;
  p.method = SetMethod::MonteCarlo;
  p.samples = samples;
  p.seed = seed;
  for (size_t c = 0; c < kConditionings; ++c) {
    std::vector<McSums> parts(workers);
    for (auto& part : parts) part.acc.assign(n, {});
    auto run_chunk = [&](unsigned w) {
      for (size_t s = w; s < samples; s += workers) {
        Rng rng(derive_seed(seed, Stream::Estimator, {static_cast<uint64_t>(c), s}));
        mc_one_sample(spec, n, static_cast<Conditioning>(c), rng, parts[w]);
      }
    };
    if (workers == 1) {
      run_chunk(0);
    } else {
      std::vector<std::thread> threads;
      for (unsigned w = 0; w < workers; ++w) threads.emplace_back(run_chunk, w);
      for (auto& t : threads) t.join();
    }
    McSums total;
    total.acc.assign(n, {});
    for (const auto& part : parts) {
      for (size_t j = 0; j < n; ++j) total.acc[j].merge(part.acc[j]);
    }
    p.h[c].resize(n);
    p.se[c].resize(n);
    for (size_t j = 0; j < n; ++j) {
      p.h[c][j] = total.acc[j].mean();
      p.se[c][j] = total.acc[j].stderr_mean();
    }
  }
  return p;
}

}  // namespace

EntropyProfile compute_entropies(const WiretapSpec& spec, size_t n, SetMethod method,
                                 size_t samples, uint64_t seed, unsigned workers) {
  log2_exact(n);
  spec.validate();
  switch (method) {
    case SetMethod::ExactBec: return exact_bec_profile(spec, n);
    case SetMethod::Enumeration: return enumeration_profile(spec, n);
    case SetMethod::MonteCarlo: return monte_carlo_profile(spec, n, samples, seed, workers);
  }
  throw ConfigError("unknown set construction method");
}

PolarizedSets build_polarized_sets(const EntropyProfile& profile, double beta, uint64_t channel_hash) {
  if (!(beta > 0.0 && beta < 0.5)) throw ConfigError("beta must lie in (0, 1/2)");
  size_t n = profile.n;
  log2_exact(n);
  for (const auto& v : profile.h) {
    if (v.size() != n) throw DimensionMismatch("entropy vector length differs from block length");
  }
  PolarizedSets sets;
  sets.n = n;
  sets.beta = beta;
  sets.delta_n = std::exp2(-std::pow(static_cast<double>(n), beta));
  sets.method = profile.method;
  sets.samples = profile.samples;
  sets.seed = profile.seed;
  sets.channel_hash = channel_hash;

  for (size_t c = 0; c < kConditionings; ++c) {
    sets.entropies[c] = profile.h[c];
    for (double& v : sets.entropies[c]) v = std::clamp(v, 0.0, 1.0);
  }
  // Extra side information never raises a true conditional entropy; enforce the
  // same monotonicity on estimates so the set containments hold by construction.
  auto cap = [&](Conditioning lo, Conditioning hi) {
    auto& a = sets.entropies[size_t(lo)];
    const auto& b = sets.entropies[size_t(hi)];
    for (size_t j = 0; j < n; ++j) a[j] = std::min(a[j], b[j]);
  };
  cap(Conditioning::CarrierY1, Conditioning::Carrier);
  cap(Conditioning::CarrierY2, Conditioning::Carrier);
  cap(Conditioning::CarrierZ, Conditioning::Carrier);
  cap(Conditioning::PrefixVZ, Conditioning::PrefixV);

  for (size_t c = 0; c < kConditionings; ++c) {
    for (uint32_t j = 0; j < n; ++j) {
      double h = sets.entropies[c][j];
      if (h >= 1.0 - sets.delta_n) sets.high[c].push_back(j);
      if (h <= sets.delta_n) sets.low[c].push_back(j);
    }
  }
  return sets;
}

Partition partition_high_set(const PolarizedSets& sets) {
  Partition part;
  const IndexList& hv = sets.high_set(Conditioning::Carrier);
  part.G = inter_of(sets.high_set(Conditioning::CarrierZ), hv);
  part.C = diff_of(hv, part.G);
  const IndexList& l1 = sets.low_set(Conditioning::CarrierY1);
  const IndexList& l2 = sets.low_set(Conditioning::CarrierY2);
  auto split = [&](const IndexList& s, IndexList& x0, IndexList& x1, IndexList& x2, IndexList& x12) {
    for (uint32_t j : s) {
      bool d1 = contains(l1, j), d2 = contains(l2, j);
      if (d1 && d2) x0.push_back(j);
      else if (!d1 && d2) x1.push_back(j);
      else if (d1 && !d2) x2.push_back(j);
      else x12.push_back(j);
    }
  };
  split(part.G, part.G0, part.G1, part.G2, part.G12);
  split(part.C, part.C0, part.C1, part.C2, part.C12);
  return part;
}

const char* to_string(ChainCase c) {
  switch (c) {
    case ChainCase::A: return "A";
    case ChainCase::B: return "B";
    case ChainCase::C: return "C";
    case ChainCase::D: return "D";
  }
  return "?";
}

ChainCase classify_case(const Partition& part) {
  size_t g0 = part.G0.size(), g1 = part.G1.size(), g2 = part.G2.size();
  size_t c1 = part.C1.size(), c2 = part.C2.size(), c12 = part.C12.size();
  // Fully unpolarized carrier: no cell exists, every chaining set is empty and
  // any case label works. Label it A so the all-noise layout stays buildable.
  if (part.G.empty() && part.C.empty()) return ChainCase::A;
  if (g1 > c2 && g2 > c1 && g0 >= c12) return ChainCase::A;
  if (g1 > c2 && g2 > c1 && g0 < c12) return ChainCase::B;
  if (g1 >= c2 && g2 <= c1 && g0 > c12) return ChainCase::C;
  if (g1 < c2 && g2 < c1 && g0 > c12) return ChainCase::D;
  throw CaseUndefined("cell sizes (" + std::to_string(g0) + "," + std::to_string(g1) + "," +
                      std::to_string(g2) + "," + std::to_string(c1) + "," + std::to_string(c2) + "," +
                      std::to_string(c12) + ") match no chaining case");
}

ChainingPlan derive_chaining_plan(const Partition& part, ChainCase label) {
  ChainingPlan plan;
  plan.label = label;
  size_t c1 = part.C1.size(), c2 = part.C2.size(), c12 = part.C12.size();

  switch (label) {
    case ChainCase::A: {
      plan.R1 = take_lowest(part.G2, c1, "R1 in G2");
      plan.R2 = take_lowest(part.G1, c2, "R2 in G1");
      plan.R12 = take_lowest(part.G0, c12, "R12 in G0");
      break;
    }
    case ChainCase::B: {
      plan.R1 = take_lowest(part.G2, c1, "R1 in G2");
      plan.R2 = take_lowest(part.G1, c2, "R2 in G1");
      plan.R12 = part.G0;
      size_t k = c12 - part.G0.size();
      plan.R1p = take_lowest(diff_of(part.G2, plan.R1), k, "R1p in G2");
      plan.R2p = take_lowest(diff_of(part.G1, plan.R2), k, "R2p in G1");
      break;
    }
    case ChainCase::C: {
      plan.R2 = take_lowest(part.G1, c2, "R2 in G1");
      plan.R12 = take_lowest(part.G0, c12, "R12 in G0");
      size_t m = c1 - part.G2.size();  // predicate guarantees |G2| <= |C1|
      plan.R1 = union_of(part.G2, take_lowest(diff_of(part.G0, plan.R12), m, "R1 extension in G0"));
      break;
    }
    case ChainCase::D: {
      plan.R12 = take_lowest(part.G0, c12, "R12 in G0");
      plan.R2 = part.G1;
      size_t k = c2 - part.G1.size();
      plan.R12p = take_lowest(diff_of(part.G0, plan.R12), k, "R12p in G0");
      if (c1 < part.G2.size() + k) throw InfeasiblePlan("C1 too small for the double-duty split");
      size_t m = c1 - part.G2.size() - k;
      plan.R1 = union_of(
          part.G2, take_lowest(diff_of(part.G0, union_of(plan.R12, plan.R12p)), m, "R1 extension in G0"));
      break;
    }
  }

  IndexList used = union_of(union_of(plan.R1, plan.R1p), union_of(plan.R12, plan.R12p));
  plan.I = diff_of(union_of(part.G0, part.G2), used);
  IndexList rs_home = diff_of(part.G1, union_of(plan.R2, plan.R2p));
  plan.RS = take_lowest(rs_home, inter_of(plan.I, part.G2).size(), "RS in G1");
  plan.RLambda = union_of(part.G12, diff_of(rs_home, plan.RS));
  plan.filler = inter_of(plan.R1, part.G0);

  plan.psi = {plan.R2.size(), plan.R12p.size()};
  plan.theta_bar = {plan.R1.size(), plan.R12p.size()};
  plan.gamma = {plan.R12.size(), plan.R2p.size()};
  plan.gamma_bar = {plan.R12.size(), plan.R1p.size()};

  // Size identities of the construction; violations mean the derivation above
  // is wrong, not that the input is infeasible.
  if (plan.R1.size() + plan.R12p.size() != c1 || plan.R2.size() + plan.R12p.size() != c2 ||
      plan.R12.size() + plan.R1p.size() != c12 || plan.R12.size() + plan.R2p.size() != c12) {
    throw InfeasiblePlan("chaining slot sizes violate the size identities");
  }
  return plan;
}

RateReport rate_report(const ChainingPlan& plan, const PolarizedSets& sets, size_t blocks) {
  if (blocks < 2) throw ConfigError("a session needs at least 2 blocks");
  Partition part = partition_high_set(sets);
  RateReport r;
  r.n = sets.n;
  r.blocks = blocks;
  double n = static_cast<double>(sets.n);
  double L = static_cast<double>(blocks);

  size_t s_first = union_of(union_of(plan.I, part.G1), part.G12).size();
  size_t s_last = union_of(plan.I, part.G2).size();
  r.w_bits_per_block = part.C.size();
  r.s_bits_total = (blocks - 2) * plan.I.size() + s_first + s_last;
  r.r_w = part.C.size() / n;
  r.r_s = r.s_bits_total / (n * L);

  const IndexList& hv = sets.high_set(Conditioning::Carrier);
  const IndexList& hxv = sets.high_set(Conditioning::PrefixV);
  const IndexList& hxvz = sets.high_set(Conditioning::PrefixVZ);
  r.r_r = diff_of(hxv, hxvz).size() / n;

  IndexList hv_comp = complement_of(hv, sets.n);
  size_t ups1 = diff_of(hv, sets.low_set(Conditioning::CarrierY1)).size();
  size_t ups2 = diff_of(hv, sets.low_set(Conditioning::CarrierY2)).size();
  size_t phi1 = diff_of(hv_comp, sets.low_set(Conditioning::CarrierY1)).size();
  size_t phi2 = diff_of(hv_comp, sets.low_set(Conditioning::CarrierY2)).size();
  r.key_bits_total = part.C1.size() + part.C12.size() + blocks * (phi1 + phi2) + ups1 + ups2;
  r.key_rate = r.key_bits_total / (n * L);

  size_t v_mid = diff_of(hv_comp, sets.low_set(Conditioning::Carrier)).size();
  size_t x_mid = diff_of(complement_of(hxv, sets.n), sets.low_set(Conditioning::PrefixV)).size();
  r.extra_bits_total = hxvz.size() + blocks * (v_mid + x_mid);
  r.extra_randomness_rate = r.extra_bits_total / (n * L);
  return r;
}

}  // namespace wbc

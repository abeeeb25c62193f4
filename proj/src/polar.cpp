#include "wbc/polar.hpp"

#include "wbc/errors.hpp"

namespace wbc {

void polar_transform_inplace(Bits& u) {
  size_t n = u.size();
  log2_exact(n);
  for (size_t half = n / 2; half >= 1; half /= 2) {
    for (size_t base = 0; base < n; base += 2 * half) {
      for (size_t i = 0; i < half; ++i) u[base + i] ^= u[base + half + i];
    }
    if (half == 1) break;
  }
}

Bits polar_transform(Bits u) {
  polar_transform_inplace(u);
  return u;
}

ScLaw carrier_law(const WiretapSpec& spec, size_t n) {
  log2_exact(n);
  ScLaw law;
  law.prior.assign(n, {spec.p_v(0), spec.p_v(1)});
  return law;
}

ScLaw carrier_law_with_output(const WiretapSpec& spec, const OutputLaw& out, const Symbols& obs) {
  log2_exact(obs.size());
  ScLaw law;
  law.prior.resize(obs.size());
  for (size_t i = 0; i < obs.size(); ++i) {
    law.prior[i] = {spec.p_v(0) * spec.out_given_v(out, obs[i], 0),
                    spec.p_v(1) * spec.out_given_v(out, obs[i], 1)};
  }
  return law;
}

ScLaw prefix_law(const WiretapSpec& spec, const Bits& v) {
  log2_exact(v.size());
  ScLaw law;
  law.prior.resize(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    law.prior[i] = {spec.p_x_given_v(0, v[i]), spec.p_x_given_v(1, v[i])};
  }
  return law;
}

ScLaw prefix_law_with_output(const WiretapSpec& spec, const Bits& v, const Symbols& z_obs) {
  if (v.size() != z_obs.size()) throw LengthMismatch("carrier block and observation block differ in length");
  ScLaw law = prefix_law(spec, v);
  for (size_t i = 0; i < v.size(); ++i) {
    law.prior[i][0] *= spec.z.row[0][z_obs[i]];
    law.prior[i][1] *= spec.z.row[1][z_obs[i]];
  }
  return law;
}

namespace {

// Normalize a pair in place; a zero-probability pair becomes (0.5, 0.5) so a
// contradictory conditioning degrades to a fair coin instead of NaN.
inline void normalize(PriorPair& w) {
  double s = w[0] + w[1];
  if (s > 0.0) {
    w[0] /= s;
    w[1] /= s;
  } else {
    w[0] = w[1] = 0.5;
  }
}

std::vector<PriorPair> minus_layer(const std::vector<PriorPair>& w) {
  size_t m = w.size() / 2;
  std::vector<PriorPair> out(m);
  for (size_t i = 0; i < m; ++i) {
    out[i] = {w[i][0] * w[m + i][0] + w[i][1] * w[m + i][1],
              w[i][0] * w[m + i][1] + w[i][1] * w[m + i][0]};
    normalize(out[i]);
  }
  return out;
}

std::vector<PriorPair> plus_layer(const std::vector<PriorPair>& w, const Bits& sum_bits) {
  size_t m = w.size() / 2;
  std::vector<PriorPair> out(m);
  for (size_t i = 0; i < m; ++i) {
    out[i] = {w[i][sum_bits[i]] * w[m + i][0], w[i][sum_bits[i] ^ 1] * w[m + i][1]};
    normalize(out[i]);
  }
  return out;
}

void pass_rec(const std::vector<PriorPair>& w, size_t j0,
              const std::function<int(size_t, double)>& decide, Bits& out) {
  if (w.size() == 1) {
    PriorPair p = w[0];
    normalize(p);
    int b = decide(j0, p[0]);
    out.push_back(static_cast<uint8_t>(b & 1));
    return;
  }
  size_t m = w.size() / 2;
  pass_rec(minus_layer(w), j0, decide, out);
  Bits first(out.end() - m, out.end());
  polar_transform_inplace(first);  // involution: back to the sum bits a xor b
  pass_rec(plus_layer(w, first), j0 + m, decide, out);
}

double posterior_rec(const std::vector<PriorPair>& w, size_t j, const Bits& prefix) {
  if (w.size() == 1) {
    PriorPair p = w[0];
    normalize(p);
    return p[0];
  }
  size_t m = w.size() / 2;
  if (j < m) return posterior_rec(minus_layer(w), j, prefix);
  Bits first(prefix.begin(), prefix.begin() + m);
  polar_transform_inplace(first);
  Bits rest(prefix.begin() + m, prefix.end());
  return posterior_rec(plus_layer(w, first), j - m, rest);
}

}  // namespace

double sc_posterior(const ScLaw& law, size_t j, const Bits& prefix) {
  if (j >= law.size()) throw DimensionMismatch("posterior index out of range");
  if (prefix.size() < j) throw LengthMismatch("posterior prefix shorter than index");
  Bits pre(prefix.begin(), prefix.begin() + j);
  pre.resize(law.size(), 0);  // bits past j are never consulted
  return posterior_rec(law.prior, j, pre);
}

int decide_bit(double p0, FillRule rule, Rng* rng) {
  if (rule == FillRule::Argmax) return p0 >= 0.5 ? 0 : 1;
  return rng->u01() < p0 ? 0 : 1;
}

Bits sc_pass(const ScLaw& law, const std::function<int(size_t, double)>& decide) {
  log2_exact(law.size());
  Bits out;
  out.reserve(law.size());
  pass_rec(law.prior, 0, decide, out);
  return out;
}

Bits sc_decode(const ScLaw& law, const std::vector<int>& known) {
  if (known.size() != law.size()) throw LengthMismatch("known-bit map length differs from block length");
  return sc_pass(law, [&known](size_t j, double p0) {
    int k = known[j];
    if (k == kDecode) return p0 >= 0.5 ? 0 : 1;
    return k;
  });
}

}  // namespace wbc

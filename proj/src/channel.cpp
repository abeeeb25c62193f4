#include "wbc/channel.hpp"

#include <cmath>

#include "wbc/errors.hpp"
#include "wbc/mathutil.hpp"

namespace wbc {

OutputLaw OutputLaw::bec(double eps) {
  if (eps < 0.0 || eps > 1.0) throw ConfigError("erasure rate outside [0,1]");
  OutputLaw law;
  law.alphabet = 3;
  law.row[0] = {1.0 - eps, 0.0, eps};
  law.row[1] = {0.0, 1.0 - eps, eps};
  return law;
}

OutputLaw OutputLaw::bsc(double p) {
  if (p < 0.0 || p > 1.0) throw ConfigError("crossover probability outside [0,1]");
  OutputLaw law;
  law.alphabet = 2;
  law.row[0] = {1.0 - p, p};
  law.row[1] = {p, 1.0 - p};
  return law;
}

OutputLaw OutputLaw::identity() { return bec(0.0); }

OutputLaw OutputLaw::from_rows(std::vector<double> row0, std::vector<double> row1) {
  OutputLaw law;
  if (row0.size() != row1.size()) throw ConfigError("output law rows differ in length");
  law.alphabet = row0.size();
  law.row[0] = std::move(row0);
  law.row[1] = std::move(row1);
  return law;
}

void OutputLaw::validate(const std::string& name) const {
  if (alphabet < 2) throw ConfigError(name + ": output alphabet must have at least 2 symbols");
  for (int x = 0; x < 2; ++x) {
    if (row[x].size() != alphabet) throw ConfigError(name + ": row length differs from alphabet");
    double s = 0.0;
    for (double p : row[x]) {
      if (p < 0.0 || p > 1.0 || !std::isfinite(p)) throw ConfigError(name + ": transition probability outside [0,1]");
      s += p;
    }
    if (std::fabs(s - 1.0) > 1e-12) throw ConfigError(name + ": transition row does not sum to 1");
  }
}

bool OutputLaw::is_erasure() const {
  if (alphabet != 3) return false;
  return row[0][1] == 0.0 && row[1][0] == 0.0 && row[0][2] == row[1][2];
}

double OutputLaw::erasure_rate() const { return row[0][2]; }

double WiretapSpec::p_x_given_v(int x, int v) const {
  double pv = p_v(v);
  if (pv <= 0.0) return 0.5;  // unreachable conditioning; any proper value works
  return p_vx(v, x) / pv;
}

double WiretapSpec::out_given_v(const OutputLaw& law, uint8_t y, int v) const {
  return p_x_given_v(0, v) * law.row[0][y] + p_x_given_v(1, v) * law.row[1][y];
}

bool WiretapSpec::x_equals_v() const {
  return joint_vx[1] == 0.0 && joint_vx[2] == 0.0;
}

void WiretapSpec::validate() const {
  double s = 0.0;
  for (double p : joint_vx) {
    if (p < 0.0 || p > 1.0 || !std::isfinite(p)) throw ConfigError("joint input law entry outside [0,1]");
    s += p;
  }
  if (std::fabs(s - 1.0) > 1e-12) throw ConfigError("joint input law does not sum to 1");
  y1.validate("y1");
  y2.validate("y2");
  z.validate("z");
}

uint64_t WiretapSpec::content_hash() const {
  // FNV-1a over the canonical byte image of the law.
  uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 0x100000001b3ULL;
    }
  };
  mix(joint_vx.data(), sizeof(double) * joint_vx.size());
  for (const OutputLaw* law : {&y1, &y2, &z}) {
    uint64_t a = law->alphabet;
    mix(&a, sizeof(a));
    for (int x = 0; x < 2; ++x) mix(law->row[x].data(), sizeof(double) * law->row[x].size());
  }
  return h;
}

double cond_entropy_v(const WiretapSpec& spec) { return binary_entropy(spec.p_v(1)); }

double cond_entropy_v_given(const WiretapSpec& spec, const OutputLaw& law) {
  // H(V | out) = sum_y P(y) H(V | y)
  double h = 0.0;
  for (uint8_t y = 0; y < law.alphabet; ++y) {
    double p0 = spec.p_v(0) * spec.out_given_v(law, y, 0);
    double p1 = spec.p_v(1) * spec.out_given_v(law, y, 1);
    double py = p0 + p1;
    if (py <= 0.0) continue;
    h += py * binary_entropy(p1 / py);
  }
  return h;
}

OrderReport validate_and_order(WiretapSpec& spec) {
  spec.validate();
  OrderReport rep;
  rep.h_v_given_y1 = cond_entropy_v_given(spec, spec.y1);
  rep.h_v_given_y2 = cond_entropy_v_given(spec, spec.y2);
  rep.h_v_given_z = cond_entropy_v_given(spec, spec.z);
  if (rep.h_v_given_y1 < rep.h_v_given_y2) {
    std::swap(spec.y1, spec.y2);
    std::swap(rep.h_v_given_y1, rep.h_v_given_y2);
    spec.swapped = !spec.swapped;
    rep.swapped = true;
  }
  if (!(rep.h_v_given_z > rep.h_v_given_y1)) {
    throw DegenerateChannel("eavesdropper must be strictly noisier than the weaker receiver: H(V|Z) > H(V|Y1)");
  }
  return rep;
}

namespace {

double cond_entropy_z_given_v(const WiretapSpec& spec) {
  double h = 0.0;
  for (int v = 0; v < 2; ++v) {
    double pv = spec.p_v(v);
    if (pv <= 0.0) continue;
    std::vector<double> pz(spec.z.alphabet, 0.0);
    for (uint8_t y = 0; y < spec.z.alphabet; ++y) pz[y] = spec.out_given_v(spec.z, y, v);
    h += pv * entropy_bits(pz);
  }
  return h;
}

double cond_entropy_z_given_vx(const WiretapSpec& spec) {
  double h = 0.0;
  for (int v = 0; v < 2; ++v) {
    for (int x = 0; x < 2; ++x) {
      double p = spec.p_vx(v, x);
      if (p <= 0.0) continue;
      h += p * entropy_bits(spec.z.row[x]);
    }
  }
  return h;
}

}  // namespace

RateTriple corner_point_rates(const WiretapSpec& spec) {
  RateTriple r;
  double hv = cond_entropy_v(spec);
  r.r_w = hv - cond_entropy_v_given(spec, spec.z);
  r.r_s = (hv - cond_entropy_v_given(spec, spec.y1)) - r.r_w;
  r.r_r = cond_entropy_z_given_v(spec) - cond_entropy_z_given_vx(spec);
  return r;
}

namespace {

uint8_t draw_from_row(const std::vector<double>& row, Rng& rng) {
  double u = rng.u01();
  double acc = 0.0;
  for (size_t y = 0; y < row.size(); ++y) {
    acc += row[y];
    if (u < acc) return static_cast<uint8_t>(y);
  }
  // guard against accumulated rounding when u ~ 1
  for (size_t y = row.size(); y-- > 0;) {
    if (row[y] > 0.0) return static_cast<uint8_t>(y);
  }
  return 0;
}

}  // namespace

BlockObservations sample_outputs(const WiretapSpec& spec, const Bits& x_block, Rng& rng) {
  BlockObservations obs;
  obs.y1.resize(x_block.size());
  obs.y2.resize(x_block.size());
  obs.z.resize(x_block.size());
  for (size_t i = 0; i < x_block.size(); ++i) {
    obs.y1[i] = draw_from_row(spec.y1.row[x_block[i]], rng);
    obs.y2[i] = draw_from_row(spec.y2.row[x_block[i]], rng);
    obs.z[i] = draw_from_row(spec.z.row[x_block[i]], rng);
  }
  return obs;
}

SymbolDraw sample_symbols(const WiretapSpec& spec, Rng& rng) {
  SymbolDraw d;
  double u = rng.u01();
  double acc = 0.0;
  int vx = 3;
  for (int i = 0; i < 4; ++i) {
    acc += spec.joint_vx[i];
    if (u < acc) {
      vx = i;
      break;
    }
  }
  d.v = vx >> 1;
  d.x = vx & 1;
  d.y1 = draw_from_row(spec.y1.row[d.x], rng);
  d.y2 = draw_from_row(spec.y2.row[d.x], rng);
  d.z = draw_from_row(spec.z.row[d.x], rng);
  return d;
}

}  // namespace wbc

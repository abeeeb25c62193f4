#include <cmath>
#include <map>

#include "doctest.h"
#include "wbc/channel.hpp"
#include "wbc/mathutil.hpp"

using namespace wbc;

namespace {

WiretapSpec bec_triple(double e1, double e2, double ez) {
  WiretapSpec spec;
  spec.joint_vx = {0.5, 0.0, 0.0, 0.5};
  spec.y1 = OutputLaw::bec(e1);
  spec.y2 = OutputLaw::bec(e2);
  spec.z = OutputLaw::bec(ez);
  spec.validate();
  return spec;
}

// Independent H(V | output) oracle: direct marginalization over the joint.
double entropy_oracle(const WiretapSpec& spec, const OutputLaw& law) {
  double h = 0.0;
  for (uint8_t y = 0; y < law.alphabet; ++y) {
    double py = 0.0;
    std::array<double, 2> joint{};
    for (int v = 0; v < 2; ++v) {
      joint[v] = spec.p_v(v) * spec.out_given_v(law, y, v);
      py += joint[v];
    }
    if (py <= 0.0) continue;
    h += py * binary_entropy(joint[0] / py);
  }
  return h;
}

}  // namespace

TEST_CASE("output law construction and validation") {
  OutputLaw bec = OutputLaw::bec(0.3);
  CHECK(bec.alphabet == 3);
  CHECK(bec.is_erasure());
  CHECK(bec.erasure_rate() == doctest::Approx(0.3));
  CHECK(bec.row[0][0] == doctest::Approx(0.7));
  CHECK(bec.row[0][kErasure] == doctest::Approx(0.3));
  CHECK(bec.row[1][0] == 0.0);

  OutputLaw bsc = OutputLaw::bsc(0.1);
  CHECK(bsc.alphabet == 2);
  CHECK_FALSE(bsc.is_erasure());
  CHECK(bsc.row[0][1] == doctest::Approx(0.1));

  OutputLaw id = OutputLaw::identity();
  CHECK(id.is_erasure());
  CHECK(id.erasure_rate() == 0.0);

  OutputLaw custom = OutputLaw::from_rows({0.2, 0.5, 0.3}, {0.6, 0.1, 0.3});
  CHECK_NOTHROW(custom.validate("custom"));
  CHECK_THROWS_AS(OutputLaw::from_rows({0.2, 0.5}, {0.6, 0.1, 0.3}).validate("bad"), ConfigError);
  CHECK_THROWS_AS(OutputLaw::from_rows({0.9, 0.3}, {0.5, 0.5}).validate("bad"), ConfigError);
}

TEST_CASE("wiretap spec validation") {
  WiretapSpec spec = bec_triple(0.4, 0.3, 0.7);
  CHECK(spec.p_v(0) == doctest::Approx(0.5));
  CHECK(spec.p_x_given_v(0, 0) == doctest::Approx(1.0));
  CHECK(spec.x_equals_v());
  CHECK(spec.content_hash() != 0);
  CHECK(spec.content_hash() == bec_triple(0.4, 0.3, 0.7).content_hash());
  CHECK(spec.content_hash() != bec_triple(0.4, 0.3, 0.6).content_hash());

  WiretapSpec bad = spec;
  bad.joint_vx = {0.5, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("receiver ordering on the erasure triple") {
  WiretapSpec spec = bec_triple(0.4, 0.3, 0.7);
  OrderReport rep = validate_and_order(spec);
  CHECK(rep.h_v_given_y1 == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(rep.h_v_given_y2 == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(rep.h_v_given_z == doctest::Approx(0.7).epsilon(1e-12));
  CHECK_FALSE(rep.swapped);

  // Entropies agree with the independent marginalization oracle.
  CHECK(rep.h_v_given_y1 == doctest::Approx(entropy_oracle(spec, spec.y1)).epsilon(1e-12));
  CHECK(rep.h_v_given_z == doctest::Approx(entropy_oracle(spec, spec.z)).epsilon(1e-12));
}

TEST_CASE("receivers are swapped when y2 is weaker") {
  WiretapSpec spec = bec_triple(0.3, 0.4, 0.7);
  OrderReport rep = validate_and_order(spec);
  CHECK(rep.swapped);
  CHECK(spec.swapped);
  CHECK(rep.h_v_given_y1 == doctest::Approx(0.4));
  CHECK(rep.h_v_given_y2 == doctest::Approx(0.3));
  CHECK(spec.y1.erasure_rate() == doctest::Approx(0.4));
}

TEST_CASE("degenerate channels are rejected") {
  // Noiseless eavesdropper: H(V|Z) = 0 can never exceed H(V|Y1).
  WiretapSpec spec = bec_triple(0.4, 0.3, 0.7);
  spec.z = OutputLaw::identity();
  CHECK_THROWS_AS(validate_and_order(spec), DegenerateChannel);
  // Ties are rejected too: the assumption is strict.
  WiretapSpec tie = bec_triple(0.4, 0.3, 0.4);
  CHECK_THROWS_AS(validate_and_order(tie), DegenerateChannel);
}

TEST_CASE("corner point on the erasure triple") {
  WiretapSpec spec = bec_triple(0.4, 0.3, 0.7);
  validate_and_order(spec);
  RateTriple rates = corner_point_rates(spec);
  CHECK(rates.r_w == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(rates.r_s == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(rates.r_r == doctest::Approx(0.0));
}

TEST_CASE("independent eavesdropper yields zero private rate") {
  WiretapSpec spec = bec_triple(0.4, 0.3, 0.7);
  spec.z = OutputLaw::from_rows({0.5, 0.5}, {0.5, 0.5});
  OrderReport rep = validate_and_order(spec);
  CHECK(rep.h_v_given_z == doctest::Approx(1.0));
  RateTriple rates = corner_point_rates(spec);
  CHECK(rates.r_w == doctest::Approx(0.0));
  CHECK(rates.r_s == doctest::Approx(1.0 - 0.4));  // I(V;Y1) = 1 - eps
  CHECK(rates.r_r == doctest::Approx(0.0));        // X = V
}

TEST_CASE("corner point components are nonnegative once ordered") {
  Rng rng(77);
  int accepted = 0;
  while (accepted < 10) {
    WiretapSpec spec;
    double flip = 0.5 * rng.u01();  // V uniform, X = BSC(flip)(V)
    spec.joint_vx = {0.5 - flip / 2, flip / 2, flip / 2, 0.5 - flip / 2};
    spec.y1 = OutputLaw::bec(rng.u01());
    spec.y2 = OutputLaw::bec(rng.u01());
    spec.z = OutputLaw::bsc(0.5 * rng.u01());
    try {
      validate_and_order(spec);
    } catch (const DegenerateChannel&) {
      continue;
    }
    RateTriple rates = corner_point_rates(spec);
    CHECK(rates.r_w >= -1e-12);
    CHECK(rates.r_s >= -1e-12);
    CHECK(rates.r_r >= -1e-12);
    ++accepted;
  }
}

TEST_CASE("sampling through the three output laws") {
  WiretapSpec spec = bec_triple(0.4, 0.3, 0.7);
  spec.y1 = OutputLaw::identity();
  Bits x{0, 1, 1, 0};
  Rng rng(42);
  BlockObservations obs = sample_outputs(spec, x, rng);
  CHECK(obs.y1 == Symbols{0, 1, 1, 0});
  CHECK(obs.y2.size() == 4);
  CHECK(obs.z.size() == 4);

  // Certain erasure.
  spec.y2 = OutputLaw::bec(1.0);
  Rng rng2(42);
  obs = sample_outputs(spec, x, rng2);
  CHECK(obs.y2 == Symbols{kErasure, kErasure, kErasure, kErasure});

  // Determinism under a fixed seed.
  Rng a(7), b(7);
  BlockObservations oa = sample_outputs(spec, Bits(8, 0), a);
  BlockObservations ob = sample_outputs(spec, Bits(8, 0), b);
  CHECK(oa.y1 == ob.y1);
  CHECK(oa.y2 == ob.y2);
  CHECK(oa.z == ob.z);
}

TEST_CASE("sampled output frequencies match the law") {
  OutputLaw law = OutputLaw::bsc(0.3);
  WiretapSpec spec = bec_triple(0.4, 0.3, 0.7);
  spec.z = law;
  Rng rng(2024);
  const size_t samples = 100000;
  std::vector<size_t> counts(2, 0);
  Bits x(1, 1);
  for (size_t i = 0; i < samples; ++i) {
    BlockObservations obs = sample_outputs(spec, x, rng);
    ++counts[obs.z[0]];
  }
  double p = chi2_pvalue(counts, {0.3, 0.7});  // row for x = 1
  CHECK(p > 0.001);
}

TEST_CASE("single-letter joint sampling matches entropies within three sigma") {
  WiretapSpec spec;
  spec.joint_vx = {0.7, 0.0, 0.0, 0.3};
  spec.y1 = OutputLaw::bsc(0.1);
  spec.y2 = OutputLaw::bec(0.2);
  spec.z = OutputLaw::bec(0.6);
  spec.validate();
  double exact = cond_entropy_v_given(spec, spec.y1);
  CHECK(exact == doctest::Approx(entropy_oracle(spec, spec.y1)).epsilon(1e-12));

  // Plug-in estimate from samples.
  Rng rng(31337);
  const size_t samples = 100000;
  std::map<std::pair<int, int>, size_t> vy;
  std::map<int, size_t> y;
  for (size_t i = 0; i < samples; ++i) {
    SymbolDraw draw = sample_symbols(spec, rng);
    ++vy[{draw.v, draw.y1}];
    ++y[draw.y1];
  }
  double h = 0.0;
  for (auto& [key, c] : vy) {
    double pvy = double(c) / samples;
    double py = double(y[key.second]) / samples;
    h -= pvy * std::log2(pvy / py);
  }
  CHECK(std::abs(h - exact) < 0.02);
}

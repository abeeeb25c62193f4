#include <cmath>

#include "doctest.h"
#include "wbc/polar.hpp"

using namespace wbc;

namespace {

WiretapSpec uniform_copy_spec(OutputLaw y1 = OutputLaw::identity(),
                              OutputLaw y2 = OutputLaw::identity(),
                              OutputLaw z = OutputLaw::bec(0.5)) {
  WiretapSpec spec;
  spec.joint_vx = {0.5, 0.0, 0.0, 0.5};
  spec.y1 = std::move(y1);
  spec.y2 = std::move(y2);
  spec.z = std::move(z);
  spec.validate();
  return spec;
}

// Exact joint probability of a carrier block u given per-symbol observations,
// by brute force over source blocks: P(v) * P(obs | v) with v = T(u).
double exact_block_posterior(const ScLaw& law, const Bits& u) {
  Bits v = polar_transform(u);
  double num = 1.0;
  for (size_t i = 0; i < v.size(); ++i) num *= law.prior[i][v[i]];
  double den = 0.0;
  size_t n = law.size();
  for (size_t mask = 0; mask < (size_t{1} << n); ++mask) {
    double p = 1.0;
    for (size_t i = 0; i < n; ++i) p *= law.prior[i][(mask >> i) & 1];
    den += p;
  }
  return den > 0.0 ? num / den : 0.0;
}

}  // namespace

TEST_CASE("polar transform on small frozen blocks") {
  CHECK(polar_transform(Bits{0, 0}) == Bits{0, 0});
  CHECK(polar_transform(Bits{1, 0}) == Bits{1, 0});
  CHECK(polar_transform(Bits{0, 1}) == Bits{1, 1});
  CHECK(polar_transform(Bits{1, 1}) == Bits{0, 1});
  // n=4 closed form: (x0^x1^x2^x3, x1^x3, x2^x3, x3)
  CHECK(polar_transform(Bits{1, 0, 1, 1}) == Bits{1, 1, 0, 1});
  CHECK(polar_transform(Bits(8, 0)) == Bits(8, 0));
  CHECK_THROWS_AS(polar_transform(Bits{0, 1, 0}), DimensionMismatch);
}

TEST_CASE("polar transform is a linear involution") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    Bits a = rng.bits(64), b = rng.bits(64);
    CHECK(polar_transform(polar_transform(a)) == a);
    CHECK(polar_transform(xor_bits(a, b)) == xor_bits(polar_transform(a), polar_transform(b)));
  }
}

TEST_CASE("posterior of a single uniform bit") {
  WiretapSpec spec = uniform_copy_spec();
  ScLaw law = carrier_law(spec, 1);
  CHECK(sc_posterior(law, 0, {}) == doctest::Approx(0.5));
}

TEST_CASE("noiseless observations pin the posterior") {
  WiretapSpec spec = uniform_copy_spec();
  ScLaw law = carrier_law_with_output(spec, spec.y1, Symbols{0, 0});
  // v = (0,0) forces u = (0,0)
  CHECK(sc_posterior(law, 0, {}) == doctest::Approx(1.0));
  CHECK(sc_posterior(law, 1, Bits{0}) == doctest::Approx(1.0));
}

TEST_CASE("erased observations carry no information") {
  WiretapSpec spec = uniform_copy_spec(OutputLaw::bec(0.5));
  ScLaw law = carrier_law_with_output(spec, spec.y1, Symbols{kErasure, kErasure});
  CHECK(sc_posterior(law, 0, {}) == doctest::Approx(0.5));
  CHECK(sc_posterior(law, 1, Bits{0}) == doctest::Approx(0.5));
  CHECK(sc_posterior(law, 1, Bits{1}) == doctest::Approx(0.5));
}

TEST_CASE("contradictory conditioning degrades to a fair coin") {
  WiretapSpec spec = uniform_copy_spec();
  // Observations force v=(0,0) hence u=(0,0); prefix u0=1 is impossible.
  ScLaw law = carrier_law_with_output(spec, spec.y1, Symbols{0, 0});
  CHECK(sc_posterior(law, 1, Bits{1}) == doctest::Approx(0.5));
}

TEST_CASE("posterior chain rule matches the exact joint law") {
  WiretapSpec spec;
  spec.joint_vx = {0.7 * 1.0, 0.0, 0.0, 0.3 * 1.0};  // V ~ Bern(0.3), X = V
  spec.y1 = OutputLaw::bsc(0.1);
  spec.y2 = OutputLaw::bec(0.4);
  spec.z = OutputLaw::bec(0.7);
  spec.validate();

  for (size_t n : {2, 4, 8}) {
    Rng rng(100 + n);
    Symbols obs(n);
    for (auto& s : obs) s = static_cast<uint8_t>(rng.below(2));
    ScLaw law = carrier_law_with_output(spec, spec.y1, obs);
    for (int rep = 0; rep < 8; ++rep) {
      Bits u = rng.bits(n);
      double product = 1.0;
      for (size_t j = 0; j < n; ++j) {
        double p0 = sc_posterior(law, j, u);
        product *= u[j] ? 1.0 - p0 : p0;
      }
      CHECK(product == doctest::Approx(exact_block_posterior(law, u)).epsilon(1e-9));
    }
  }
}

TEST_CASE("realized posteriors form a probability distribution over blocks") {
  WiretapSpec spec = uniform_copy_spec(OutputLaw::bsc(0.2));
  Symbols obs{1, 0, 1, 1};
  ScLaw law = carrier_law_with_output(spec, spec.y1, obs);
  size_t n = 4;
  double total = 0.0;
  for (size_t mask = 0; mask < 16; ++mask) {
    Bits u(n);
    for (size_t j = 0; j < n; ++j) u[j] = (mask >> j) & 1;
    double product = 1.0;
    for (size_t j = 0; j < n; ++j) {
      double p0 = sc_posterior(law, j, u);
      product *= u[j] ? 1.0 - p0 : p0;
    }
    CHECK(product == doctest::Approx(exact_block_posterior(law, u)).epsilon(1e-9));
    total += product;
  }
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("fill rules") {
  Rng rng(5);
  CHECK(decide_bit(0.9, FillRule::Argmax, nullptr) == 0);
  CHECK(decide_bit(0.5, FillRule::Argmax, nullptr) == 0);  // ties break to zero
  CHECK(decide_bit(0.1, FillRule::Argmax, nullptr) == 1);
  for (int i = 0; i < 50; ++i) {
    CHECK(decide_bit(1.0, FillRule::Sample, &rng) == 0);
    CHECK(decide_bit(0.0, FillRule::Sample, &rng) == 1);
  }
}

TEST_CASE("sc_decode leaves known bits verbatim") {
  WiretapSpec spec = uniform_copy_spec(OutputLaw::bec(1.0));
  ScLaw law = carrier_law_with_output(spec, spec.y1, Symbols{kErasure, kErasure, kErasure, kErasure});
  std::vector<int> known{1, 0, 1, 1};
  CHECK(sc_decode(law, known) == Bits{1, 0, 1, 1});
  CHECK_THROWS_AS(sc_decode(law, std::vector<int>{1, 0}), LengthMismatch);
}

TEST_CASE("sc_decode recovers the block from noiseless observations") {
  WiretapSpec spec = uniform_copy_spec();
  Rng rng(21);
  for (size_t n : {2, 8, 16}) {
    for (int rep = 0; rep < 10; ++rep) {
      Bits v = rng.bits(n);
      Symbols obs(v.begin(), v.end());
      ScLaw law = carrier_law_with_output(spec, spec.y1, obs);
      std::vector<int> known(n, kDecode);
      CHECK(sc_decode(law, known) == polar_transform(v));
    }
  }
}

TEST_CASE("sc_pass visits indices in order with sane posteriors") {
  WiretapSpec spec = uniform_copy_spec(OutputLaw::bsc(0.3));
  Symbols obs{0, 1, 0, 0, 1, 1, 0, 1};
  ScLaw law = carrier_law_with_output(spec, spec.y1, obs);
  size_t expect = 0;
  Bits out = sc_pass(law, [&expect](size_t j, double p0) {
    CHECK(j == expect);
    ++expect;
    CHECK(p0 >= 0.0);
    CHECK(p0 <= 1.0);
    return 0;
  });
  CHECK(expect == 8);
  CHECK(out == Bits(8, 0));
}

TEST_CASE("prefix layer law conditions on the carrier block") {
  WiretapSpec spec;
  // X | V through a BSC(0.2): joint picks V uniform.
  spec.joint_vx = {0.5 * 0.8, 0.5 * 0.2, 0.5 * 0.2, 0.5 * 0.8};
  spec.y1 = OutputLaw::identity();
  spec.y2 = OutputLaw::identity();
  spec.z = OutputLaw::bec(0.5);
  spec.validate();
  CHECK_FALSE(spec.x_equals_v());

  ScLaw law = prefix_law(spec, Bits{0, 1});
  CHECK(law.prior[0][0] == doctest::Approx(0.8));
  CHECK(law.prior[0][1] == doctest::Approx(0.2));
  CHECK(law.prior[1][0] == doctest::Approx(0.2));
  CHECK(law.prior[1][1] == doctest::Approx(0.8));

  // With Z observed through an erasure channel, erased symbols change nothing.
  ScLaw law2 = prefix_law_with_output(spec, Bits{0, 1}, Symbols{kErasure, kErasure});
  for (size_t i = 0; i < 2; ++i) {
    double s = law2.prior[i][0] + law2.prior[i][1];
    CHECK(law2.prior[i][0] / s == doctest::Approx(law.prior[i][0]));
  }
}

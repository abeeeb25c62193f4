#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wbc/bits.hpp"
#include "wbc/rng.hpp"

namespace wbc {

// Memoryless binary-input output law, P(y | x) by row. Erasure laws use the
// symbol order {0, 1, kErasure}.
struct OutputLaw {
  size_t alphabet = 0;
  std::array<std::vector<double>, 2> row;

  static OutputLaw bec(double eps);
  static OutputLaw bsc(double p);
  static OutputLaw identity();  // noiseless copy
  static OutputLaw from_rows(std::vector<double> row0, std::vector<double> row1);

  void validate(const std::string& name) const;
  bool is_erasure() const;        // {identity on 0/1} + shared erasure symbol
  double erasure_rate() const;    // only meaningful when is_erasure()
  bool operator==(const OutputLaw&) const = default;
};

// One-shot source/channel description: joint input law P(V=v, X=x) plus the
// three output laws applied to X. Receiver 1 is the weaker legitimate receiver
// after validate_and_order.
struct WiretapSpec {
  std::array<double, 4> joint_vx{};  // index 2*v + x
  OutputLaw y1, y2, z;
  bool swapped = false;  // receiver roles were exchanged during ordering

  double p_v(int v) const { return joint_vx[2 * v] + joint_vx[2 * v + 1]; }
  double p_vx(int v, int x) const { return joint_vx[2 * v + x]; }
  double p_x_given_v(int x, int v) const;
  // P(out = y | V = v) through a given output law (marginalized over X).
  double out_given_v(const OutputLaw& law, uint8_t y, int v) const;
  bool x_equals_v() const;  // the prefix layer is a deterministic copy

  void validate() const;
  uint64_t content_hash() const;
};

struct OrderReport {
  double h_v_given_y1 = 0.0, h_v_given_y2 = 0.0, h_v_given_z = 0.0;
  bool swapped = false;
};

// Checks the law, orders the receivers so H(V|Y1) >= H(V|Y2), and verifies
// H(V|Z) > H(V|Y1) (strict; ties are rejected). Throws DegenerateChannel.
OrderReport validate_and_order(WiretapSpec& spec);

struct RateTriple {
  double r_w = 0.0;  // I(V;Z)
  double r_s = 0.0;  // I(V;Y1) - I(V;Z)
  double r_r = 0.0;  // I(X;Z|V)
};

RateTriple corner_point_rates(const WiretapSpec& spec);

// Exact single-letter conditional entropies (bits).
double cond_entropy_v_given(const WiretapSpec& spec, const OutputLaw& law);
double cond_entropy_v(const WiretapSpec& spec);

struct BlockObservations {
  Symbols y1, y2, z;
};

// Pushes one channel-input block through the three output laws.
BlockObservations sample_outputs(const WiretapSpec& spec, const Bits& x_block, Rng& rng);

// Draws one (v, x, y1, y2, z) tuple from the single-letter joint law.
struct SymbolDraw {
  int v = 0, x = 0;
  uint8_t y1 = 0, y2 = 0, z = 0;
};
SymbolDraw sample_symbols(const WiretapSpec& spec, Rng& rng);

}  // namespace wbc

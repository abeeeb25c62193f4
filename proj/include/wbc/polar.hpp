#pragma once

#include <array>
#include <functional>
#include <vector>

#include "wbc/channel.hpp"

namespace wbc {

// Self-inverse butterfly transform on a power-of-two block, natural index
// order: T(a || b) = (T(a xor b) || T(b)). Both the carrier and prefix layers
// use it for analysis and synthesis.
void polar_transform_inplace(Bits& u);
Bits polar_transform(Bits u);

// Per-symbol unnormalized prior pair w[bit] = P(source_i = bit, observation_i).
using PriorPair = std::array<double, 2>;

// Everything successive-cancellation needs about one block: the per-symbol
// joint of the source bit with whatever side information is available.
struct ScLaw {
  std::vector<PriorPair> prior;
  size_t size() const { return prior.size(); }
};

// Carrier layer (source V), optionally conditioned on an observed output block.
ScLaw carrier_law(const WiretapSpec& spec, size_t n);
ScLaw carrier_law_with_output(const WiretapSpec& spec, const OutputLaw& law, const Symbols& obs);

// Prefix layer (source X given the realized carrier block v), optionally with
// the eavesdropper's observation.
ScLaw prefix_law(const WiretapSpec& spec, const Bits& v);
ScLaw prefix_law_with_output(const WiretapSpec& spec, const Bits& v, const Symbols& z_obs);

// Exact P(U_j = 0 | U_0..U_{j-1} = prefix, observations), 0-based j.
// A conditioning event of probability zero returns 0.5.
double sc_posterior(const ScLaw& law, size_t j, const Bits& prefix);

enum class FillRule { Sample, Argmax };

// Decision helpers shared by encoder fills and decoders. Argmax breaks the
// exact tie toward 0; Sample draws u01 < p0 -> 0.
int decide_bit(double p0, FillRule rule, Rng* rng);

// One full successive-cancellation pass. decide(j, p0) must return the chosen
// bit for index j; indices arrive in increasing order with exact posteriors.
Bits sc_pass(const ScLaw& law, const std::function<int(size_t, double)>& decide);

inline constexpr int kDecode = -1;

// known[j] in {0,1} pins a bit; kDecode lets the pass argmax-decode it.
Bits sc_decode(const ScLaw& law, const std::vector<int>& known);

}  // namespace wbc

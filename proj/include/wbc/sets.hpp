#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "wbc/channel.hpp"

namespace wbc {

// The six per-index conditional entropy families the construction uses.
enum class Conditioning : size_t {
  Carrier = 0,    // H(A_j | A^{<j})
  CarrierY1 = 1,  // H(A_j | A^{<j}, Y1^n)
  CarrierY2 = 2,  // H(A_j | A^{<j}, Y2^n)
  CarrierZ = 3,   // H(A_j | A^{<j}, Z^n)
  PrefixV = 4,    // H(T_j | T^{<j}, V^n)
  PrefixVZ = 5,   // H(T_j | T^{<j}, V^n, Z^n)
};
inline constexpr size_t kConditionings = 6;

enum class SetMethod { ExactBec, MonteCarlo, Enumeration };
const char* to_string(SetMethod m);
SetMethod set_method_from_string(const std::string& s);

struct EntropyProfile {
  size_t n = 0;
  SetMethod method = SetMethod::ExactBec;
  size_t samples = 0;   // per index, monte_carlo only
  uint64_t seed = 0;
  std::array<std::vector<double>, kConditionings> h;   // raw per-index estimates
  std::array<std::vector<double>, kConditionings> se;  // standard errors (0 for exact methods)
};

// Computes all six entropy vectors by the requested route.
//  - ExactBec: closed-form erasure recursion; requires uniform V, X = V, and
//    erasure output laws everywhere (MethodUnsupported otherwise).
//  - MonteCarlo: per-index mean of -log2(posterior of the true bit), `samples`
//    draws, split across `workers` threads deterministically.
//  - Enumeration: exact brute force over side-information sequences; intended
//    for small n (the work guard throws BudgetExceeded).
EntropyProfile compute_entropies(const WiretapSpec& spec, size_t n, SetMethod method,
                                 size_t samples, uint64_t seed, unsigned workers);

struct PolarizedSets {
  size_t n = 0;
  double beta = 0.0;
  double delta_n = 0.0;
  SetMethod method = SetMethod::ExactBec;
  size_t samples = 0;
  uint64_t seed = 0;
  uint64_t channel_hash = 0;
  // Entropy vectors after clamping to [0,1] and enforcing the conditioning
  // monotonicity (extra side information never raises an estimate).
  std::array<std::vector<double>, kConditionings> entropies;
  std::array<IndexList, kConditionings> high, low;

  const IndexList& high_set(Conditioning c) const { return high[static_cast<size_t>(c)]; }
  const IndexList& low_set(Conditioning c) const { return low[static_cast<size_t>(c)]; }
};

// Thresholds at 1 - delta_n / delta_n with delta_n = 2^(-n^beta).
PolarizedSets build_polarized_sets(const EntropyProfile& profile, double beta, uint64_t channel_hash = 0);

struct Partition {
  IndexList G, C;                      // secret/private halves of H_V
  IndexList G0, G1, G2, G12;           // G split by receiver decodability
  IndexList C0, C1, C2, C12;           // same split of C
};

// Splits H_V by membership in H_{V|Z} and the two receivers' low sets.
// Subscript k means receiver k cannot SC-decode the cell (index not in L_{V|Yk}).
Partition partition_high_set(const PolarizedSets& sets);

enum class ChainCase { A, B, C, D };
const char* to_string(ChainCase c);

// Mutually exclusive size predicates on (|G0|,|G1|,|G2|,|C1|,|C2|,|C12|).
// Throws CaseUndefined when none matches.
ChainCase classify_case(const Partition& part);

// Sizes of the two sub-slices each chained sequence splits into.
struct Split {
  size_t first = 0, second = 0;
};

struct ChainingPlan {
  ChainCase label = ChainCase::A;
  // Repeat slots inside G; primed sets are the double-duty variants.
  IndexList R1, R1p, R2, R2p, R12, R12p;
  IndexList I;        // leftover secret-message cell inside G0 u G2
  IndexList RS;       // repeat home for the previous block's I n G2 content
  IndexList RLambda;  // repeat home for the carrier-fill seed
  IndexList filler;   // R1 n G0: no writer at the last block, filled with fresh bits
  Split psi;          // C2-sequence  -> (R2 slot, R12p slot)
  Split theta_bar;    // C1-sequence  -> (R1 slot, R12p slot)
  Split gamma;        // C12-sequence -> (R12 slot, R2p slot)
  Split gamma_bar;    // C12-sequence -> (R12 slot, R1p slot)
};

// Carves the chaining subsets out of the partition cells, lowest indices
// first. Throws InfeasiblePlan when a required subset cannot be carved.
ChainingPlan derive_chaining_plan(const Partition& part, ChainCase label);

struct RateReport {
  size_t n = 0, blocks = 0;
  double r_w = 0.0;                     // private-message rate |C|/n
  double r_s = 0.0;                     // confidential-message rate
  double r_r = 0.0;                     // channel-prefix randomization rate
  double key_rate = 0.0;                // secret-key bits per channel use
  double extra_randomness_rate = 0.0;   // middle-set sampling + seed bits per use
  size_t w_bits_per_block = 0;
  size_t s_bits_total = 0;
  size_t key_bits_total = 0;
  size_t extra_bits_total = 0;
};

RateReport rate_report(const ChainingPlan& plan, const PolarizedSets& sets, size_t blocks);

// Frozen-set cache: one JSON file per (channel, n, beta, method, samples, seed).
struct SetsCacheKey {
  uint64_t channel_hash = 0;
  size_t n = 0;
  double beta = 0.0;
  SetMethod method = SetMethod::ExactBec;
  size_t samples = 0;
  uint64_t seed = 0;
  std::string filename() const;
};

std::optional<PolarizedSets> sets_cache_load(const std::string& dir, const SetsCacheKey& key);
void sets_cache_store(const std::string& dir, const SetsCacheKey& key, const PolarizedSets& sets);

}  // namespace wbc

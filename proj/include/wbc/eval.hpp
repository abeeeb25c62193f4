#pragma once

#include <functional>

#include "wbc/codec.hpp"
#include "wbc/decoder.hpp"

namespace wbc {

// Finite-length analysis constants for one block length, base-2 logs.
struct PolarConstants {
  double delta_n = 0.0;      // polarization threshold 2^(-n^beta)
  double delta1 = 0.0;       // single-block distribution mismatch
  double delta2 = 0.0;       // chained-block mismatch amplification
  double delta_star = 0.0;   // total variation proxy per block
  double delta_s = 0.0;      // per-block secrecy leakage proxy
};

PolarConstants polar_constants(size_t n, double beta);

// Session-level reliability proxy: L(L+1)/2 * (n delta_n + 2 delta_star).
double reliability_bound(size_t n, double beta, size_t blocks);

struct ReliabilityPoint {
  size_t n = 0, blocks = 0, trials = 0;
  size_t rx1_block_errors = 0, rx2_block_errors = 0;
  size_t session_errors = 0;
  double session_error_rate = 0.0;
  double se = 0.0;  // binomial standard error of the session rate
};

// Monte Carlo end-to-end sessions: fresh keys, messages, fills, and channel
// noise each trial; a session errs when either receiver misdecodes any bit.
ReliabilityPoint run_reliability_trials(const WiretapSpec& spec, const PolarizedSets& sets,
                                        size_t blocks, size_t trials, uint64_t seed,
                                        unsigned workers);

struct EnumBudget {
  size_t max_branch_bits = 26;   // uniform bits plus worst-case sampled branches
  double max_table_cells = 5e7;  // densest table an exact check may allocate
};

// One fully realized session with its exact probability weight.
struct SessionRecord {
  double weight = 0.0;
  std::vector<Bits> w, s;               // message words per block
  std::vector<Bits> u, t, x;            // carrier block, prefix block, channel input
  std::vector<Bits> psi, gamma_plain, pi, lambda;  // chain reads per block
  Bits key_theta, key_gamma, lambda_x;
};

// Walks every session the scheme can produce: uniform messages, keys, filler
// and randomizers, with exact posterior weights on the sampled middle indices.
void enumerate_sessions(const SessionLayout& lay, const EnumBudget& budget,
                        const std::function<void(const SessionRecord&)>& visit);

// Exact fill enumeration of a single carrier plus prefix block given the
// content already placed on H_V. visit(u, t, weight).
void enumerate_block_fills(const SessionLayout& lay, const Bits& a_content, const Bits& r_bits,
                           const Bits& lambda_x,
                           const std::function<void(const Bits&, const Bits&, double)>& visit);

struct LeakageResult {
  double mi_bits = 0.0;  // exact I(S; Z-blocks)
  size_t s_bits = 0;
  size_t z_cells = 0;
};

LeakageResult exact_leakage(const SessionLayout& lay, const EnumBudget& budget);

// Exact I(S_1, Z1-block; Z2-block | S_2, chain reads of block 1, prefix seed,
// masked chain content of block 2) for a two-block session. The chaining
// structure makes it exactly zero; two blocks only.
double exact_chain_separation_cmi(const SessionLayout& lay, const EnumBudget& budget);

struct IndependenceReport {
  double max_theta_mi = 0.0;  // worst per-block I(plain C1 word; masked C1 word)
  double max_gamma_mi = 0.0;  // same for the C12 word
};

// One-time-pad independence of the chained words, end to end through the
// encoder: enumerates private words and keys, reads the masked words back
// from the encoder trace.
IndependenceReport chain_mask_independence(const SessionLayout& lay, const EnumBudget& budget);

struct TvReport {
  size_t n = 0;
  double tv = 0.0;          // exact TV between the encoder block law and the target law
  double tv_per_bit = 0.0;  // tv / n
};

// Single honest block, uniform content on H_V: total variation between the
// induced (carrier, prefix) block law and the target memoryless law.
TvReport carrier_prefix_tv(const SessionLayout& lay, const EnumBudget& budget);

// Exact I((carrier bits on H_{V|Z}, prefix bits on H_{X|VZ}); Z-block) for a
// single honest block; the polarization argument drives it down with n.
double exact_hidden_mi(const SessionLayout& lay, const EnumBudget& budget);

struct RateScanRow {
  size_t n = 0;
  ChainCase label = ChainCase::A;
  RateReport rates;
};

std::vector<RateScanRow> rate_convergence_scan(const WiretapSpec& spec,
                                               const std::vector<size_t>& lengths, double beta,
                                               size_t blocks, SetMethod method, size_t samples,
                                               uint64_t seed, unsigned workers);

struct MiEstimate {
  size_t samples = 0;
  double mi_plugin = 0.0;     // raw plug-in estimate, bits
  double mi_corrected = 0.0;  // Miller-Madow corrected
  double ci_lo = 0.0;         // bootstrap percentile bounds, 99% by default
  double ci_hi = 0.0;
};

// Samples full sessions, counts (confidential words, eavesdropper blocks)
// jointly, and bootstraps an interval for the corrected estimate: replicate
// deviations from their median, recentered on the estimate itself (plain
// percentile bounds inherit the resampling's extra coincidence bias).
MiEstimate estimate_leakage_mi(const SessionLayout& lay, size_t samples, uint64_t seed,
                               size_t bootstrap_reps, double ci_level = 0.99);

}  // namespace wbc

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace wbc {

inline double xlog2x(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

inline double binary_entropy(double p) { return -xlog2x(p) - xlog2x(1.0 - p); }

// Shannon entropy in bits of a (possibly unnormalized) nonnegative vector,
// interpreted after normalization: H = -sum p/s log2(p/s).
inline double entropy_bits(const std::vector<double>& w) {
  double s = 0.0;
  for (double v : w) s += v;
  if (s <= 0.0) return 0.0;
  double h = 0.0;
  for (double v : w) {
    if (v > 0.0) h -= v * std::log2(v / s);
  }
  return h / s;
}

// Regularized lower incomplete gamma P(a, x) (series for x < a+1, continued
// fraction otherwise).
inline double reg_gamma_p(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 0.0;
  if (x == 0.0) return 0.0;
  double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  // Lentz continued fraction for Q(a, x)
  double b = x + 1.0 - a, c = 1e308, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-30) d = 1e-30;
    c = b + an / c;
    if (std::fabs(c) < 1e-30) c = 1e-30;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  double q = std::exp(-x + a * std::log(x) - gln) * h;
  return 1.0 - q;
}

// Survival function of the chi-square law with dof degrees of freedom.
inline double chi2_sf(double stat, double dof) {
  return 1.0 - reg_gamma_p(dof / 2.0, stat / 2.0);
}

// Pearson chi-square p-value of observed counts against expected probabilities.
// Cells with zero expected probability must have zero counts.
inline double chi2_pvalue(const std::vector<size_t>& counts, const std::vector<double>& probs) {
  double total = 0.0;
  for (size_t c : counts) total += static_cast<double>(c);
  double stat = 0.0;
  int cells = 0;
  for (size_t i = 0; i < counts.size(); ++i) {
    double e = probs[i] * total;
    if (e <= 0.0) continue;
    double d = static_cast<double>(counts[i]) - e;
    stat += d * d / e;
    ++cells;
  }
  if (cells <= 1) return 1.0;
  return chi2_sf(stat, static_cast<double>(cells - 1));
}

// Streaming mean / standard-error accumulator.
struct MeanAccumulator {
  double sum = 0.0, sumsq = 0.0;
  size_t count = 0;
  void add(double v) {
    sum += v;
    sumsq += v * v;
    ++count;
  }
  void merge(const MeanAccumulator& o) {
    sum += o.sum;
    sumsq += o.sumsq;
    count += o.count;
  }
  double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
  double stderr_mean() const {
    if (count < 2) return 0.0;
    double n = static_cast<double>(count);
    double var = (sumsq - sum * sum / n) / (n - 1.0);
    return var > 0.0 ? std::sqrt(var / n) : 0.0;
  }
};

}  // namespace wbc

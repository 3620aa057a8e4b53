#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <vector>

#include "modelcmp/bayes_eval.hpp"
#include "modelcmp/distributions.hpp"
#include "modelcmp/errors.hpp"

namespace modelcmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct MeanVar {
  double mean = 0.0;
  double var = 0.0;  // sample variance, n-1 denominator
};

MeanVar mean_var(const double* data, std::size_t n) {
  MeanVar mv;
  for (std::size_t i = 0; i < n; ++i) mv.mean += data[i];
  mv.mean /= static_cast<double>(n);
  if (n > 1) {
    for (std::size_t i = 0; i < n; ++i)
      mv.var += (data[i] - mv.mean) * (data[i] - mv.mean);
    mv.var /= static_cast<double>(n - 1);
  }
  return mv;
}

// Order-preserving mapping of finite doubles onto uint64 for radix sorting.
std::uint64_t sort_key(double x) {
  std::uint64_t u;
  std::memcpy(&u, &x, sizeof(u));
  return (u & 0x8000000000000000ULL) ? ~u : (u | 0x8000000000000000ULL);
}

struct KeyIndex {
  std::uint64_t key;
  std::uint32_t index;
};

/// LSD radix sort by key; draws are sorted ~5x faster than std::sort, which
/// matters because every parameter of every pair gets rank-normalized.
void radix_sort(std::vector<KeyIndex>& items, std::vector<KeyIndex>& scratch) {
  const std::size_t n = items.size();
  scratch.resize(n);
  KeyIndex* from = items.data();
  KeyIndex* to = scratch.data();
  for (int pass = 0; pass < 8; ++pass) {
    const int shift = pass * 8;
    std::size_t counts[256] = {};
    for (std::size_t i = 0; i < n; ++i) ++counts[(from[i].key >> shift) & 0xFF];
    std::size_t offset = 0;
    for (std::size_t bucket = 0; bucket < 256; ++bucket) {
      const std::size_t c = counts[bucket];
      counts[bucket] = offset;
      offset += c;
    }
    for (std::size_t i = 0; i < n; ++i)
      to[counts[(from[i].key >> shift) & 0xFF]++] = from[i];
    std::swap(from, to);
  }
  // Eight passes: data is back in items.
}

/// Mid-rank transform of the pooled draws followed by the inverse-normal
/// map z = Phi^-1((rank - 3/8) / (n + 1/4)).
void rank_normalize(const std::vector<double>& pooled, std::vector<KeyIndex>& items,
                    std::vector<KeyIndex>& scratch, std::vector<double>& z) {
  const std::size_t n = pooled.size();
  items.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    items[i] = {sort_key(pooled[i]), static_cast<std::uint32_t>(i)};
  radix_sort(items, scratch);

  z.resize(n);
  const double denom = static_cast<double>(n) + 0.25;
  std::size_t pos = 0;
  while (pos < n) {
    std::size_t end = pos + 1;
    while (end < n && items[end].key == items[pos].key) ++end;
    const double mid_rank = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
    const double value = dist::normal_quantile_fast((mid_rank - 0.375) / denom);
    for (std::size_t t = pos; t < end; ++t) z[items[t].index] = value;
    pos = end;
  }
}

/// Classic split-R-hat over sequences of equal length.
double split_rhat(const std::vector<const double*>& seqs, std::size_t len) {
  const std::size_t m = seqs.size();
  std::vector<MeanVar> stats(m);
  for (std::size_t s = 0; s < m; ++s) stats[s] = mean_var(seqs[s], len);

  double w = 0.0, grand = 0.0;
  for (const auto& mv : stats) {
    w += mv.var;
    grand += mv.mean;
  }
  w /= static_cast<double>(m);
  grand /= static_cast<double>(m);

  double b = 0.0;
  for (const auto& mv : stats) b += (mv.mean - grand) * (mv.mean - grand);
  b *= static_cast<double>(len) / static_cast<double>(m - 1);

  const double nd = static_cast<double>(len);
  if (w <= 0.0) return b > 0.0 ? kInf : 1.0;
  const double var_plus = (nd - 1.0) / nd * w + b / nd;
  return std::sqrt(var_plus / w);
}

/// Batch-means ESS of one sequence (already rank-normalized).
double batch_means_ess(const double* data, std::size_t n) {
  if (n < 16) return static_cast<double>(n);
  const MeanVar overall = mean_var(data, n);
  if (overall.var <= 0.0) return 0.0;

  const std::size_t b = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  const std::size_t m = n / b;
  std::vector<double> batch_mean(m);
  for (std::size_t i = 0; i < m; ++i) {
    double sum = 0.0;
    for (std::size_t t = 0; t < b; ++t) sum += data[i * b + t];
    batch_mean[i] = sum / static_cast<double>(b);
  }
  const MeanVar bm = mean_var(batch_mean.data(), m);
  if (bm.var <= 0.0) return static_cast<double>(n);
  const double tau = static_cast<double>(b) * bm.var / overall.var;
  return static_cast<double>(n) / std::max(tau, 1e-12);
}

}  // namespace

Diagnostics diagnostics(const Chains& chains) {
  const std::size_t c = chains.n_chains();
  const std::size_t s = chains.n_draws();
  if (c == 0 || s == 0) throw ValidationError("diagnostics: empty chains");

  Diagnostics out;
  out.rhat_available = c >= 2;
  const std::size_t half = s / 2;  // split halves; odd leftover draw dropped
  const std::size_t n_params = chains.n_params();
  out.params.reserve(n_params);

  std::vector<double> pooled, z;
  std::vector<KeyIndex> items, scratch;
  for (std::size_t p = 0; p < n_params; ++p) {
    pooled.clear();
    pooled.reserve(c * 2 * half);
    for (std::size_t ci = 0; ci < c; ++ci) {
      const auto& column = chains.draws[ci][p];
      pooled.insert(pooled.end(), column.begin(), column.begin() + 2 * half);
    }
    rank_normalize(pooled, items, scratch, z);

    std::vector<const double*> seqs;
    seqs.reserve(2 * c);
    for (std::size_t ci = 0; ci < c; ++ci) {
      seqs.push_back(z.data() + ci * 2 * half);
      seqs.push_back(z.data() + ci * 2 * half + half);
    }

    ParamDiagnostic d;
    d.name = chains.param_name(p);
    d.rhat = out.rhat_available && half >= 2
                 ? split_rhat(seqs, half)
                 : std::numeric_limits<double>::quiet_NaN();
    double ess = 0.0;
    for (const double* seq : seqs) ess += batch_means_ess(seq, half);
    d.ess = ess;
    out.params.push_back(std::move(d));
  }
  return out;
}

}  // namespace modelcmp

#include "rstdiag/stats/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <thread>

#include <boost/math/distributions/chi_squared.hpp>

namespace rstdiag::stats {

RatingsMatrix::RatingsMatrix(int units, int raters) : units_(units), raters_(raters) {
  if (units < 0 || raters < 0) throw StatsError("matrix dimensions must be non-negative");
  cells_.resize(static_cast<std::size_t>(units) * static_cast<std::size_t>(raters));
}

RatingsMatrix RatingsMatrix::from_rows(const std::vector<std::vector<std::optional<int>>>& rows) {
  const int raters = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  RatingsMatrix m(static_cast<int>(rows.size()), raters);
  for (int u = 0; u < m.units(); ++u) {
    if (static_cast<int>(rows[u].size()) != raters) throw StatsError("ragged ratings matrix");
    for (int r = 0; r < raters; ++r) m.set(u, r, rows[u][r]);
  }
  return m;
}

const std::optional<int>& RatingsMatrix::at(int unit, int rater) const {
  if (unit < 0 || unit >= units_ || rater < 0 || rater >= raters_) throw std::out_of_range("ratings matrix index");
  return cells_[static_cast<std::size_t>(unit) * raters_ + rater];
}

void RatingsMatrix::set(int unit, int rater, std::optional<int> value) {
  if (unit < 0 || unit >= units_ || rater < 0 || rater >= raters_) throw std::out_of_range("ratings matrix index");
  if (value && (*value < 1 || *value > 5)) throw StatsError("rating " + std::to_string(*value) + " outside 1..5");
  cells_[static_cast<std::size_t>(unit) * raters_ + rater] = value;
}

bool RatingsMatrix::complete() const {
  return std::all_of(cells_.begin(), cells_.end(), [](const auto& c) { return c.has_value(); });
}

int RatingsMatrix::pairable_units() const {
  int n = 0;
  for (int u = 0; u < units_; ++u) {
    int k = 0;
    for (int r = 0; r < raters_; ++r) k += at(u, r).has_value();
    n += k >= 2;
  }
  return n;
}

void RatingsMatrix::validate() const {
  if (raters_ < 2) throw StatsError("at least two raters are required");
  if (pairable_units() < 1) throw StatsError("at least one unit needs two or more ratings");
}

namespace {

// Per-unit coincidence contributions over the value domain. Each pairable
// unit u adds 1/(m_u - 1) for every ordered pair of distinct ratings.
struct Coincidences {
  std::vector<int> values;                 // sorted distinct values
  std::vector<std::vector<double>> units;  // flattened V x V per pairable unit
};

Coincidences unit_coincidences(const RatingsMatrix& m) {
  Coincidences c;
  for (int u = 0; u < m.units(); ++u)
    for (int r = 0; r < m.raters(); ++r)
      if (const auto& v = m.at(u, r)) c.values.push_back(*v);
  std::sort(c.values.begin(), c.values.end());
  c.values.erase(std::unique(c.values.begin(), c.values.end()), c.values.end());
  std::map<int, std::size_t> index;
  for (std::size_t i = 0; i < c.values.size(); ++i) index[c.values[i]] = i;
  const std::size_t V = c.values.size();

  for (int u = 0; u < m.units(); ++u) {
    std::vector<std::size_t> vs;
    for (int r = 0; r < m.raters(); ++r)
      if (const auto& v = m.at(u, r)) vs.push_back(index[*v]);
    if (vs.size() < 2) continue;
    std::vector<double> o(V * V, 0.0);
    const double w = 1.0 / static_cast<double>(vs.size() - 1);
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = 0; j < vs.size(); ++j)
        if (i != j) o[vs[i] * V + vs[j]] += w;
    c.units.push_back(std::move(o));
  }
  return c;
}

// alpha from a summed coincidence matrix; nullopt when De == 0.
std::optional<double> alpha_from(const std::vector<double>& o, std::size_t V) {
  std::vector<double> n_c(V, 0.0);
  double n = 0;
  for (std::size_t c = 0; c < V; ++c)
    for (std::size_t k = 0; k < V; ++k) n_c[c] += o[c * V + k];
  for (double x : n_c) n += x;

  // Ordinal metric: (sum_{g=c..k} n_g - (n_c + n_k)/2)^2
  std::vector<double> prefix(V + 1, 0.0);
  for (std::size_t g = 0; g < V; ++g) prefix[g + 1] = prefix[g] + n_c[g];
  double d_o = 0, d_e = 0;
  for (std::size_t c = 0; c < V; ++c) {
    for (std::size_t k = c + 1; k < V; ++k) {
      const double s = prefix[k + 1] - prefix[c] - (n_c[c] + n_c[k]) / 2.0;
      const double delta = s * s;
      d_o += 2.0 * o[c * V + k] * delta;  // o is symmetric
      d_e += 2.0 * n_c[c] * n_c[k] * delta;
    }
  }
  if (d_e == 0.0) return std::nullopt;
  return 1.0 - (n - 1.0) * d_o / d_e;
}

}  // namespace

std::optional<double> alpha_ordinal_point(const RatingsMatrix& m) {
  m.validate();
  const auto c = unit_coincidences(m);
  const std::size_t V = c.values.size();
  std::vector<double> o(V * V, 0.0);
  for (const auto& u : c.units)
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += u[i];
  return alpha_from(o, V);
}

double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw StatsError("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

AlphaEstimate krippendorff_alpha_ordinal(const RatingsMatrix& m, const AlphaOptions& options) {
  m.validate();
  if (options.bootstrap_samples < 1) throw StatsError("bootstrap_samples must be >= 1");
  if (!(options.confidence > 0.0 && options.confidence < 1.0)) throw StatsError("confidence must be in (0, 1)");

  const auto c = unit_coincidences(m);
  const std::size_t V = c.values.size();
  const std::size_t U = c.units.size();
  std::vector<double> total(V * V, 0.0);
  for (const auto& u : c.units)
    for (std::size_t i = 0; i < total.size(); ++i) total[i] += u[i];

  AlphaEstimate est;
  est.n_units = static_cast<int>(U);
  est.n_raters = m.raters();
  for (double x : total) est.n_values += x;
  est.seed = options.seed;

  const auto point = alpha_from(total, V);
  if (!point) {
    est.degenerate = true;
    return est;  // alpha = 1, CI [1, 1]
  }
  est.alpha = *point;
  est.bootstrap_samples = options.bootstrap_samples;

  const int B = options.bootstrap_samples;
  std::vector<double> draws(static_cast<std::size_t>(B));
  auto work = [&](int begin, int end) {
    std::vector<double> o(V * V);
    for (int b = begin; b < end; ++b) {
      std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                        static_cast<std::uint32_t>(b)};
      std::mt19937_64 rng(seq);
      std::fill(o.begin(), o.end(), 0.0);
      for (std::size_t k = 0; k < U; ++k) {
        // multiply-shift keeps the draw identical across standard libraries
        const auto pick = static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * U) >> 64);
        const auto& src = c.units[pick];
        for (std::size_t i = 0; i < o.size(); ++i) o[i] += src[i];
      }
      draws[static_cast<std::size_t>(b)] = alpha_from(o, V).value_or(1.0);
    }
  };
  int threads = options.threads > 0 ? options.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, std::max(1, B / 50));
  if (threads == 1) {
    work(0, B);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, B * t / threads, B * (t + 1) / threads);
    for (auto& th : pool) th.join();
  }
  const double tail = (1.0 - options.confidence) / 2.0;
  est.ci_low = quantile(draws, tail);
  est.ci_high = quantile(draws, 1.0 - tail);
  if (est.alpha < est.ci_low) {
    est.ci_low = est.alpha;
    est.ci_widened = true;
  }
  if (est.alpha > est.ci_high) {
    est.ci_high = est.alpha;
    est.ci_widened = true;
  }
  return est;
}

std::vector<double> midranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double chi_square_sf(double x, int df) {
  if (df < 1) throw StatsError("chi-square needs df >= 1");
  if (x <= 0) return 1.0;
  boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, x));
}

KendallW kendall_w(const RatingsMatrix& m) {
  if (!m.complete()) throw StatsError("Kendall's W requires a complete matrix (missing cells present)");
  const int n = m.units();
  const int raters = m.raters();
  if (raters < 2) throw StatsError("Kendall's W requires at least two raters");
  if (n < 2) throw StatsError("Kendall's W requires at least two items");

  std::vector<double> rank_sums(static_cast<std::size_t>(n), 0.0);
  double ties = 0.0;  // sum over raters of sum(t^3 - t)
  for (int r = 0; r < raters; ++r) {
    std::vector<double> col(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) col[static_cast<std::size_t>(u)] = *m.at(u, r);
    const auto ranks = midranks(col);
    for (int u = 0; u < n; ++u) rank_sums[static_cast<std::size_t>(u)] += ranks[static_cast<std::size_t>(u)];
    std::map<double, int> counts;
    for (double v : col) ++counts[v];
    for (const auto& [v, t] : counts) ties += static_cast<double>(t) * t * t - t;
  }
  const double md = raters, nd = n;
  double sum_sq = 0;
  for (double r : rank_sums) sum_sq += r * r;
  const double num = 12.0 * sum_sq - 3.0 * md * md * nd * (nd + 1) * (nd + 1);
  const double den = md * md * nd * (nd * nd - 1) - md * ties;
  if (den <= 0.0) throw StatsError("Kendall's W is undefined: every rater gave constant ratings");

  KendallW k;
  k.n_items = n;
  k.n_raters = raters;
  k.w = std::clamp(num / den, 0.0, 1.0);
  k.df = n - 1;
  k.chi_square = md * (nd - 1) * k.w;
  k.p_value = chi_square_sf(k.chi_square, k.df);
  return k;
}

Quartiles quartiles(const std::vector<int>& scores) {
  if (scores.empty()) throw StatsError("quartiles of an empty sample");
  std::vector<double> xs(scores.begin(), scores.end());
  std::sort(xs.begin(), xs.end());
  return {quantile(xs, 0.25), quantile(xs, 0.5), quantile(xs, 0.75)};
}

}  // namespace rstdiag::stats

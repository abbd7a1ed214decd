#ifndef COLLGRAM_STATS_HPP
#define COLLGRAM_STATS_HPP

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "collgram/error.hpp"
#include "collgram/profiler.hpp"

namespace collgram {

// ---------------------------------------------------------------------------
// Student's t distribution

namespace detail {

inline constexpr int kBetaMaxIterations = 300;
inline constexpr double kBetaTolerance = 1e-12;

// Continued fraction for I_x(a, b) (modified Lentz). Converges fast for
// x < (a + 1) / (a + b + 2).
inline double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kBetaMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kBetaTolerance) return h;
  }
  throw Error("incomplete beta continued fraction did not converge");
}

}  // namespace detail

namespace detail {

// lgamma(x + h) - lgamma(x) without the cancellation of two huge values.
inline double lgamma_difference(double x, double h) {
  if (x < 20.0) return std::lgamma(x + h) - std::lgamma(x);
  auto series = [](double z) {
    const double z2 = z * z;
    return (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * z2)) / z2) / z2) / z;
  };
  return (x - 0.5) * std::log1p(h / x) + h * std::log(x + h) - h + series(x + h) - series(x);
}

// log B(a, b)
inline double log_beta(double a, double b) {
  const double big = std::max(a, b);
  const double small = std::min(a, b);
  return std::lgamma(small) - lgamma_difference(big, small);
}

}  // namespace detail

/// Regularized incomplete beta I_x(a, b). `y` must equal 1 - x; passing it
/// separately avoids cancellation when x is close to 1.
inline double incomplete_beta(double a, double b, double x, double y) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error("incomplete beta needs a > 0 and b > 0");
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_x = x > 0.5 ? std::log1p(-y) : std::log(x);
  const double log_y = y > 0.5 ? std::log1p(-x) : std::log(y);
  const double front = std::exp(a * log_x + b * log_y - detail::log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * detail::beta_continued_fraction(b, a, y) / b;
}

inline double incomplete_beta(double a, double b, double x) {
  return incomplete_beta(a, b, x, 1.0 - x);
}

/// Two-tailed survival function P(|T| >= |t|) for Student's t with `df`
/// degrees of freedom.
inline double t_sf(double t, double df) {
  if (!(df >= 1.0)) throw Error("t distribution needs df >= 1");
  if (std::isnan(t)) throw Error("t statistic is NaN");
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double p = incomplete_beta(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2));
  return std::clamp(p, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Paired samples

struct PairedSample {
  std::vector<std::string> ids;
  std::vector<double> a;
  std::vector<double> b;

  std::size_t size() const { return a.size(); }

  std::vector<double> differences() const {
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
  }
};

/// Pairs values by position, dropping any pair with an absent side.
inline PairedSample make_paired_sample(std::span<const std::string> ids,
                                       std::span<const std::optional<double>> a,
                                       std::span<const std::optional<double>> b) {
  if (ids.size() != a.size() || a.size() != b.size())
    throw AlignmentError("paired sample sides differ in length");
  PairedSample s;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!a[i] || !b[i]) continue;
    s.ids.push_back(ids[i]);
    s.a.push_back(*a[i]);
    s.b.push_back(*b[i]);
  }
  return s;
}

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw InsufficientDataError("mean of empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 divisor), two-pass.
inline double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) throw InsufficientDataError("standard deviation needs at least 2 values");
  const double m = mean(xs);
  double ss = 0.0;
  for (const double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

struct TTestResult {
  double t_stat = 0.0;
  std::size_t df = 0;
  double p_value = 1.0;
};

namespace detail {

struct DiffMoments {
  double mean;
  double sd;
  std::size_t n;
};

inline DiffMoments checked_moments(std::span<const double> diffs) {
  if (diffs.size() < 2)
    throw InsufficientDataError("need at least 2 paired values, got " + std::to_string(diffs.size()));
  const double m = mean(diffs);
  const double sd = sample_sd(diffs);
  double scale = 0.0;
  for (const double d : diffs) scale = std::max(scale, std::fabs(d));
  if (sd <= 4.0 * DBL_EPSILON * scale || sd == 0.0)
    throw DegenerateSampleError("paired differences have zero variance");
  return {m, sd, diffs.size()};
}

}  // namespace detail

/// Repeated-measures t-test on paired differences.
inline TTestResult paired_t_test(std::span<const double> diffs) {
  const auto [m, sd, n] = detail::checked_moments(diffs);
  TTestResult r;
  r.t_stat = m / (sd / std::sqrt(static_cast<double>(n)));
  r.df = n - 1;
  r.p_value = t_sf(r.t_stat, static_cast<double>(r.df));
  return r;
}

inline TTestResult paired_t_test(const PairedSample& sample) {
  return paired_t_test(sample.differences());
}

/// d_z: |mean difference| / sd of differences.
inline double cohens_d(std::span<const double> diffs) {
  const auto [m, sd, n] = detail::checked_moments(diffs);
  return std::fabs(m) / sd;
}

inline double cohens_d(const PairedSample& sample) { return cohens_d(sample.differences()); }

/// d_av: |mean difference| / average of the two group sds.
inline double cohens_d_av(const PairedSample& sample) {
  const double m = mean(sample.differences());
  const double denom = (sample_sd(sample.a) + sample_sd(sample.b)) / 2.0;
  if (!(denom > 0.0)) throw DegenerateSampleError("both groups have zero variance");
  return std::fabs(m) / denom;
}

/// Percentage of differences whose sign matches the sign of the mean
/// difference. Zero differences stay in the denominator.
inline double same_sign_pct(std::span<const double> diffs) {
  if (diffs.empty()) throw InsufficientDataError("same-sign percentage of empty sample");
  const double m = mean(diffs);
  if (m == 0.0) throw UndefinedSignError("mean difference is zero; reference sign undefined");
  const auto matching = std::count_if(diffs.begin(), diffs.end(), [&](double d) {
    return m > 0.0 ? d > 0.0 : d < 0.0;
  });
  return 100.0 * static_cast<double>(matching) / static_cast<double>(diffs.size());
}

inline double same_sign_pct(const PairedSample& sample) { return same_sign_pct(sample.differences()); }

// ---------------------------------------------------------------------------
// Group comparison

enum class Measure { high_mi, high_t };

inline constexpr Measure kMeasures[] = {Measure::high_mi, Measure::high_t};

inline std::string_view to_string(Measure m) { return m == Measure::high_mi ? "high_mi" : "high_t"; }

inline std::optional<double> measure_value(const TextProfile& p, Measure m) {
  return m == Measure::high_mi ? p.pct_high_mi : p.pct_high_t;
}

enum class CellStatus { ok, degenerate, insufficient };

inline std::string_view to_string(CellStatus s) {
  switch (s) {
    case CellStatus::ok: return "ok";
    case CellStatus::degenerate: return "degenerate";
    case CellStatus::insufficient: return "insufficient";
  }
  return "?";
}

/// One row-minus-column cell of the triangular comparison.
struct PairedComparison {
  Measure measure = Measure::high_mi;
  std::string row;
  std::string col;
  std::size_t n = 0;
  std::optional<double> mean_diff;
  std::optional<double> t_stat;
  std::optional<std::size_t> df;
  std::optional<double> p_value;
  std::optional<double> cohen_d_z;
  std::optional<double> cohen_d_av;
  std::optional<double> pct_same_sign;
  CellStatus status = CellStatus::ok;
  std::string message;
};

struct GroupSummary {
  std::string group;
  Measure measure = Measure::high_mi;
  std::optional<double> mean;
  std::optional<double> sd;
  std::size_t n = 0;

  std::optional<double> standard_error() const {
    if (!sd || n == 0) return std::nullopt;
    return *sd / std::sqrt(static_cast<double>(n));
  }
};

struct Group {
  std::string name;
  std::vector<TextProfile> profiles;
};

struct ComparisonTable {
  Measure measure = Measure::high_mi;
  std::vector<std::string> groups;      // caller order
  std::vector<GroupSummary> means;      // one per group, caller order
  std::vector<PairedComparison> cells;  // rows 1..k-1, each with cols 0..row-1

  const PairedComparison& cell(std::size_t row, std::size_t col) const {
    if (col >= row || row >= groups.size()) throw Error("no such triangular cell");
    return cells[row * (row - 1) / 2 + col];
  }
};

/// Full comparison of one pair of aligned samples.
inline PairedComparison compare_pair(const PairedSample& sample, Measure measure, std::string row,
                                     std::string col) {
  PairedComparison c;
  c.measure = measure;
  c.row = std::move(row);
  c.col = std::move(col);
  c.n = sample.size();
  if (c.n < 2) {
    c.status = CellStatus::insufficient;
    c.message = "fewer than 2 usable pairs";
    if (c.n == 1) c.mean_diff = sample.a[0] - sample.b[0];
    return c;
  }
  const auto diffs = sample.differences();
  c.mean_diff = mean(diffs);
  c.df = c.n - 1;
  try {
    const auto test = paired_t_test(diffs);
    c.t_stat = test.t_stat;
    c.p_value = test.p_value;
    c.cohen_d_z = cohens_d(diffs);
  } catch (const DegenerateSampleError& e) {
    c.status = CellStatus::degenerate;
    c.message = e.what();
  }
  try {
    c.cohen_d_av = cohens_d_av(sample);
  } catch (const DegenerateSampleError&) {
  }
  if (*c.mean_diff != 0.0) c.pct_same_sign = same_sign_pct(diffs);
  return c;
}

inline GroupSummary summarize(const Group& group, Measure measure) {
  GroupSummary s;
  s.group = group.name;
  s.measure = measure;
  std::vector<double> values;
  for (const auto& p : group.profiles)
    if (const auto v = measure_value(p, measure)) values.push_back(*v);
  s.n = values.size();
  if (!values.empty()) s.mean = mean(values);
  if (values.size() >= 2) s.sd = sample_sd(values);
  return s;
}

/// Throws AlignmentError naming every text id that is not present in every
/// group (or is duplicated within one).
inline void check_alignment(std::span<const Group> groups) {
  std::map<std::string, std::set<std::string>> where;
  std::string problems;
  for (const auto& g : groups) {
    std::set<std::string> ids;
    for (const auto& p : g.profiles) {
      if (!ids.insert(p.text_id).second) problems += " " + p.text_id + " (duplicate in " + g.name + ")";
      where[p.text_id].insert(g.name);
    }
  }
  for (const auto& [id, present] : where) {
    if (present.size() == groups.size()) continue;
    std::string missing;
    for (const auto& g : groups)
      if (!present.contains(g.name)) missing += (missing.empty() ? "" : ",") + g.name;
    problems += " " + id + " (missing from " + missing + ")";
  }
  if (!problems.empty()) throw AlignmentError("misaligned text ids:" + problems);
}

/// Triangular all-pairs comparison: cell (row, col) with row > col holds
/// group[row] minus group[col]. Per-cell failures are recorded in the cell.
inline ComparisonTable compare_all(std::span<const Group> groups, Measure measure) {
  if (groups.size() < 2) throw InsufficientDataError("comparison needs at least 2 groups");
  check_alignment(groups);

  ComparisonTable table;
  table.measure = measure;
  std::vector<std::unordered_map<std::string, std::optional<double>>> values(groups.size());
  for (std::size_t g = 0; g < groups.size(); ++g) {
    table.groups.push_back(groups[g].name);
    table.means.push_back(summarize(groups[g], measure));
    for (const auto& p : groups[g].profiles) values[g][p.text_id] = measure_value(p, measure);
  }

  std::vector<std::string> ids;
  for (const auto& p : groups.front().profiles) ids.push_back(p.text_id);

  for (std::size_t row = 1; row < groups.size(); ++row) {
    for (std::size_t col = 0; col < row; ++col) {
      std::vector<std::optional<double>> a, b;
      for (const auto& id : ids) {
        a.push_back(values[row].at(id));
        b.push_back(values[col].at(id));
      }
      table.cells.push_back(compare_pair(make_paired_sample(ids, a, b), measure, groups[row].name,
                                         groups[col].name));
    }
  }
  return table;
}

}  // namespace collgram

#endif  // COLLGRAM_STATS_HPP

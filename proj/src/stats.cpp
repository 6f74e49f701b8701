#include "imbench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "imbench/strategies.hpp"

namespace imbench {

namespace {

double normal_two_sided(double z) {
  const boost::math::normal_distribution<double> n;
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(n, std::fabs(z))));
}

void check_matrix(const PerformanceMatrix& pm) {
  if (pm.rows() < 2 || pm.cols() < 2) {
    throw std::invalid_argument("performance matrix needs at least 2 rows and 2 columns");
  }
  for (const auto& row : pm.values) {
    if (row.size() != pm.cols()) throw std::invalid_argument("performance matrix row has the wrong width");
    for (double v : row) {
      if (!std::isfinite(v)) throw std::invalid_argument("performance matrix has a missing entry");
    }
  }
}

std::vector<double> mean_ranks_of(const PerformanceMatrix& pm) {
  std::vector<double> sums(pm.cols(), 0.0);
  for (const auto& row : pm.values) {
    const auto r = rank_row(row, pm.higher_is_better);
    for (std::size_t j = 0; j < r.size(); ++j) sums[j] += r[j];
  }
  for (auto& s : sums) s /= static_cast<double>(pm.rows());
  return sums;
}

// Calls `visit` with every set partition of {0..k-1} as a block id per item.
void for_each_partition(std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> block(k, 0);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
    if (i == k) {
      visit(block);
      return;
    }
    for (std::size_t b = 0; b <= used && b < k; ++b) {
      block[i] = b;
      rec(i + 1, std::max(used, b + 1));
    }
  };
  if (k > 0) rec(0, 0);
}

std::string letter_name(std::size_t i) {
  if (i < 26) return std::string(1, static_cast<char>('a' + i));
  if (i < 52) return std::string(1, static_cast<char>('A' + i - 26));
  throw std::invalid_argument("letter_display: more than 52 letters needed");
}

int strategy_order(const std::string& name) {
  try {
    return static_cast<int>(parse_strategy(name));
  } catch (const std::invalid_argument&) {
    return 100;
  }
}

template <typename T>
bool selected(const std::vector<T>& filter, const T& value) {
  return filter.empty() || std::find(filter.begin(), filter.end(), value) != filter.end();
}

}  // namespace

std::vector<double> rank_row(std::span<const double> values, bool higher_is_better) {
  const std::size_t k = values.size();
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return higher_is_better ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<double> ranks(k);
  for (std::size_t i = 0; i < k;) {
    std::size_t j = i;
    while (j + 1 < k && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) ranks[idx[m]] = avg;
    i = j + 1;
  }
  return ranks;
}

FriedmanResult friedman(const PerformanceMatrix& pm) {
  check_matrix(pm);
  const double n = static_cast<double>(pm.rows());
  const double k = static_cast<double>(pm.cols());
  FriedmanResult out;
  out.mean_ranks = mean_ranks_of(pm);
  double sum_sq = 0.0;
  for (double r : out.mean_ranks) sum_sq += (r * n) * (r * n);
  out.statistic = std::max(0.0, 12.0 / (n * k * (k + 1.0)) * sum_sq - 3.0 * n * (k + 1.0));
  const boost::math::chi_squared_distribution<double> chi(k - 1.0);
  out.p_value = boost::math::cdf(boost::math::complement(chi, out.statistic));
  return out;
}

std::string to_string(PosthocMethod method) {
  return method == PosthocMethod::bergmann_hommel ? "bergmann-hommel" : "holm";
}

std::vector<double> holm_adjust(std::span<const double> p) {
  const std::size_t m = p.size();
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> out(m);
  double running = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    running = std::max(running, std::min(1.0, static_cast<double>(m - i) * p[idx[i]]));
    out[idx[i]] = running;
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t k) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) out.emplace_back(i, j);
  }
  return out;
}

std::vector<std::vector<std::size_t>> exhaustive_sets(std::size_t k) {
  const auto pairs = all_pairs(k);
  std::set<std::vector<std::size_t>> sets;
  for_each_partition(k, [&](const std::vector<std::size_t>& block) {
    std::vector<std::size_t> s;
    for (std::size_t h = 0; h < pairs.size(); ++h) {
      if (block[pairs[h].first] == block[pairs[h].second]) s.push_back(h);
    }
    if (!s.empty()) sets.insert(std::move(s));
  });
  return {sets.begin(), sets.end()};
}

std::vector<double> bergmann_hommel_adjust(std::size_t k, std::span<const double> p) {
  if (k > kMaxBergmannHommelColumns) {
    throw std::invalid_argument("bergmann_hommel_adjust: too many columns for enumeration");
  }
  if (p.size() != k * (k - 1) / 2) throw std::invalid_argument("bergmann_hommel_adjust: wrong p-value count");
  std::vector<double> out(p.size(), 0.0);
  for (const auto& set : exhaustive_sets(k)) {
    double min_p = 1.0;
    for (std::size_t h : set) min_p = std::min(min_p, p[h]);
    const double value = std::min(1.0, static_cast<double>(set.size()) * min_p);
    for (std::size_t h : set) out[h] = std::max(out[h], value);
  }
  return out;
}

PosthocResult pairwise_posthoc(const PerformanceMatrix& pm, PosthocMethod method) {
  check_matrix(pm);
  const std::size_t k = pm.cols();
  PosthocResult out;
  out.mean_ranks = mean_ranks_of(pm);
  out.method = method;
  if (method == PosthocMethod::bergmann_hommel && k > kMaxBergmannHommelColumns) {
    out.method = PosthocMethod::holm;
    out.fell_back = true;
  }
  const double se = std::sqrt(static_cast<double>(k * (k + 1)) / (6.0 * static_cast<double>(pm.rows())));
  out.z.assign(k, std::vector<double>(k, 0.0));
  out.raw_p.assign(k, std::vector<double>(k, 1.0));
  out.adjusted_p.assign(k, std::vector<double>(k, 1.0));

  const auto pairs = all_pairs(k);
  std::vector<double> p(pairs.size());
  for (std::size_t h = 0; h < pairs.size(); ++h) {
    const auto [i, j] = pairs[h];
    const double z = (out.mean_ranks[i] - out.mean_ranks[j]) / se;
    out.z[i][j] = z;
    out.z[j][i] = -z;
    p[h] = normal_two_sided(z);
    out.raw_p[i][j] = out.raw_p[j][i] = p[h];
  }
  const auto adj = out.method == PosthocMethod::holm ? holm_adjust(p) : bergmann_hommel_adjust(k, p);
  for (std::size_t h = 0; h < pairs.size(); ++h) {
    const auto [i, j] = pairs[h];
    out.adjusted_p[i][j] = out.adjusted_p[j][i] = adj[h];
  }
  return out;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon: samples differ in length");
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) d.push_back(a[i] - b[i]);
  }
  if (d.empty()) throw std::invalid_argument("wilcoxon: all differences are zero");
  if (d.size() < kWilcoxonMinPairs) {
    throw std::invalid_argument("wilcoxon: fewer than 5 non-zero differences");
  }
  const std::size_t n = d.size();

  // Doubled average ranks of |d| keep everything integral.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return std::fabs(d[x]) < std::fabs(d[y]); });
  std::vector<std::uint64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::fabs(d[idx[j + 1]]) == std::fabs(d[idx[i]])) ++j;
    for (std::size_t m = i; m <= j; ++m) rank2[idx[m]] = i + j + 2;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }

  WilcoxonResult out;
  out.n = n;
  std::uint64_t plus2 = 0;
  std::uint64_t total2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (d[i] > 0) plus2 += rank2[i];
  }
  out.w_plus = static_cast<double>(plus2) / 2.0;
  out.w_minus = static_cast<double>(total2 - plus2) / 2.0;
  out.statistic = std::min(out.w_plus, out.w_minus);

  if (n <= kWilcoxonExactLimit) {
    out.exact = true;
    std::vector<std::uint64_t> count(total2 + 1, 0);
    count[0] = 1;
    std::uint64_t reach = 0;
    for (std::uint64_t r : rank2) {
      for (std::uint64_t s = reach + 1; s-- > 0;) {
        if (count[s] != 0) count[s + r] += count[s];
      }
      reach += r;
    }
    std::uint64_t lower = 0;
    std::uint64_t upper = 0;
    for (std::uint64_t s = 0; s <= total2; ++s) {
      if (s <= plus2) lower += count[s];
      if (s >= plus2) upper += count[s];
    }
    const double all = std::ldexp(1.0, static_cast<int>(n));
    out.p_value = std::min(1.0, 2.0 * static_cast<double>(std::min(lower, upper)) / all);
  } else {
    const double nn = static_cast<double>(n);
    const double mean = nn * (nn + 1.0) / 4.0;
    const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double z = std::max(0.0, std::fabs(out.w_plus - mean) - 0.5) / std::sqrt(var);
    out.p_value = normal_two_sided(z);
  }
  return out;
}

std::vector<std::string> letter_display(std::span<const double> mean_ranks,
                                        const std::vector<std::vector<bool>>& sig) {
  const std::size_t k = mean_ranks.size();
  if (sig.size() != k) throw std::invalid_argument("letter_display: significance matrix has the wrong size");
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mean_ranks[a] < mean_ranks[b]; });
  std::vector<std::size_t> position(k);
  for (std::size_t p = 0; p < k; ++p) position[order[p]] = p;

  // Groups are sets of rank positions; start with everything in one group.
  std::vector<std::set<std::size_t>> groups;
  if (k > 0) {
    std::set<std::size_t> all;
    for (std::size_t p = 0; p < k; ++p) all.insert(p);
    groups.push_back(std::move(all));
  }
  for (std::size_t pi = 0; pi < k; ++pi) {
    for (std::size_t pj = pi + 1; pj < k; ++pj) {
      if (!sig[order[pi]][order[pj]]) continue;
      std::vector<std::set<std::size_t>> next;
      for (auto& g : groups) {
        if (g.contains(pi) && g.contains(pj)) {
          auto without_i = g;
          without_i.erase(pi);
          auto without_j = g;
          without_j.erase(pj);
          next.push_back(std::move(without_i));
          next.push_back(std::move(without_j));
        } else {
          next.push_back(std::move(g));
        }
      }
      // Absorb: drop groups contained in another group, and duplicates.
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      groups.clear();
      for (std::size_t a = 0; a < next.size(); ++a) {
        bool absorbed = next[a].empty();
        for (std::size_t b = 0; b < next.size() && !absorbed; ++b) {
          absorbed = a != b && std::includes(next[b].begin(), next[b].end(), next[a].begin(), next[a].end());
        }
        if (!absorbed) groups.push_back(next[a]);
      }
    }
  }
  // Lexicographic order on position sets puts the group of the best column first.
  std::sort(groups.begin(), groups.end());

  std::vector<std::string> out(k);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t p : groups[g]) out[order[p]] += letter_name(g);
  }
  return out;
}

std::vector<std::size_t> RankSummary::order() const {
  std::vector<std::size_t> idx(columns.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(mean_ranks[a], columns[a]) < std::tie(mean_ranks[b], columns[b]);
  });
  return idx;
}

PerformanceMatrix build_matrix(const ResultTable& rt, const ComparisonQuestion& q, std::size_t* dropped_rows) {
  using RowKey = std::tuple<std::string, std::string, std::string>;  // dataset, rate, classifier
  std::map<RowKey, std::map<std::string, std::optional<double>>> cells;
  std::map<std::pair<std::string, std::string>, std::map<std::string, std::optional<double>>> shared;
  std::set<std::string> columns;

  std::vector<std::string> rates;
  for (double r : q.rates) rates.push_back(format_rate(r));

  for (const auto& [key, g] : rt.means()) {
    if (key.metric != q.metric) continue;
    const std::string rate = format_rate(key.rate);
    if (!selected(rates, rate) || !selected(q.datasets, key.dataset)) continue;
    const std::optional<double> value = g.failed || g.count == 0 ? std::nullopt : std::optional(g.mean);

    switch (q.grouping) {
      case Grouping::strategies: {
        if (!selected(q.strategies, g.strategy)) break;
        columns.insert(g.strategy);
        if (g.classifier.empty()) {
          shared[{key.dataset, rate}][g.strategy] = value;
        } else if (selected(q.classifiers, g.classifier)) {
          cells[{key.dataset, rate, g.classifier}][g.strategy] = value;
        }
        break;
      }
      case Grouping::combinations:
        if (!selected(q.strategies, g.strategy)) break;
        if (!g.classifier.empty() && !selected(q.classifiers, g.classifier)) break;
        columns.insert(key.solution);
        cells[{key.dataset, rate, ""}][key.solution] = value;
        break;
      case Grouping::pair:
        if (key.solution != q.a && key.solution != q.b) break;
        columns.insert(key.solution);
        cells[{key.dataset, rate, ""}][key.solution] = value;
        break;
    }
  }

  // Solutions without a classifier join every classifier row of their level.
  for (const auto& [level, values] : shared) {
    bool any = false;
    for (auto& [row, row_values] : cells) {
      if (std::get<0>(row) == level.first && std::get<1>(row) == level.second) {
        any = true;
        for (const auto& [col, v] : values) row_values[col] = v;
      }
    }
    if (!any) cells[{level.first, level.second, ""}] = values;
  }

  PerformanceMatrix pm;
  pm.column_names.assign(columns.begin(), columns.end());
  if (q.grouping == Grouping::strategies) {
    std::stable_sort(pm.column_names.begin(), pm.column_names.end(), [](const auto& a, const auto& b) {
      return strategy_order(a) < strategy_order(b);
    });
  } else if (q.grouping == Grouping::pair) {
    pm.column_names = {q.a, q.b};
  }

  std::size_t dropped = 0;
  for (const auto& [row, values] : cells) {
    std::vector<double> line;
    for (const auto& col : pm.column_names) {
      const auto it = values.find(col);
      if (it == values.end() || !it->second) break;
      line.push_back(*it->second);
    }
    if (line.size() != pm.column_names.size()) {
      ++dropped;
      continue;
    }
    std::string name = std::get<0>(row) + "@" + std::get<1>(row);
    if (!std::get<2>(row).empty()) name += "/" + std::get<2>(row);
    pm.row_names.push_back(std::move(name));
    pm.values.push_back(std::move(line));
  }
  if (dropped_rows) *dropped_rows = dropped;
  return pm;
}

RankSummary summarize(const PerformanceMatrix& pm, PosthocMethod method, double alpha) {
  check_matrix(pm);
  const std::size_t k = pm.cols();
  RankSummary s;
  s.columns = pm.column_names;
  s.rows = pm.rows();
  s.alpha = alpha;
  if (k == 2) {
    std::vector<double> a;
    std::vector<double> b;
    for (const auto& row : pm.values) {
      a.push_back(row[0]);
      b.push_back(row[1]);
    }
    const auto w = wilcoxon_signed_rank(a, b);
    s.wilcoxon = true;
    s.statistic = w.statistic;
    s.p_value = w.p_value;
    s.mean_ranks = mean_ranks_of(pm);
    s.adjusted_p = {{1.0, w.p_value}, {w.p_value, 1.0}};
  } else {
    const auto f = friedman(pm);
    const auto post = pairwise_posthoc(pm, method);
    s.statistic = f.statistic;
    s.p_value = f.p_value;
    s.mean_ranks = f.mean_ranks;
    s.method = post.method;
    s.fell_back = post.fell_back;
    s.adjusted_p = post.adjusted_p;
  }
  std::vector<std::vector<bool>> sig(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) sig[i][j] = i != j && s.adjusted_p[i][j] < alpha;
  }
  s.letters = letter_display(s.mean_ranks, sig);
  return s;
}

RankSummary compare(const ResultTable& rt, const ComparisonQuestion& question) {
  std::size_t dropped = 0;
  const auto pm = build_matrix(rt, question, &dropped);
  if (pm.rows() < 2 || pm.cols() < 2) {
    throw std::invalid_argument("empty selection for " + to_string(question.metric) + ": " +
                                std::to_string(pm.rows()) + " complete rows, " +
                                std::to_string(pm.cols()) + " columns");
  }
  RankSummary s = summarize(pm, question.method, question.alpha);
  s.metric = question.metric;
  s.dropped_rows = dropped;
  return s;
}

}  // namespace imbench

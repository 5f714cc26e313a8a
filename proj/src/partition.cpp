#include "symgen/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "symgen/errors.hpp"
#include "symgen/rng.hpp"

namespace symgen {
namespace {

void check_ratios(const Ratios& r) {
  for (double x : r)
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("split ratios must lie in [0, 1]");
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) throw ConfigError("split ratios must sum to 1");
}

std::size_t portion(std::size_t n, double r) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(n) * r + 0.5 + 1e-9));
}

void finish(PartitionResult& p) {
  std::sort(p.train.begin(), p.train.end());
  std::sort(p.valid.begin(), p.valid.end());
  std::sort(p.test.begin(), p.test.end());
}

void fisher_yates(IndexList& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

std::vector<std::size_t> rank_order(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  return order;
}

void check_values(std::span<const double> values, const char* what) {
  for (double v : values)
    if (!std::isfinite(v)) throw ConfigError(std::string(what) + ": values must be finite");
  if (values.empty()) throw ConfigError(std::string(what) + ": no values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) throw ConfigError(std::string(what) + ": attribute is constant, quantiles are degenerate");
}

}  // namespace

nlohmann::json PartitionResult::to_json() const {
  return {{"strategy", strategy}, {"params", params}, {"attributes", attributes},
          {"train", train},       {"valid", valid},   {"test", test}};
}

PartitionResult PartitionResult::from_json(const nlohmann::json& j) {
  PartitionResult p;
  p.strategy = j.value("strategy", "");
  p.params = j.value("params", nlohmann::json::object());
  p.attributes = j.value("attributes", std::vector<std::string>{});
  p.train = j.at("train").get<IndexList>();
  p.valid = j.at("valid").get<IndexList>();
  p.test = j.at("test").get<IndexList>();
  return p;
}

PartitionResult split_iid(std::size_t n, Ratios ratios, std::uint64_t seed) {
  check_ratios(ratios);
  if (n < 3) throw ConfigError("i.i.d. split needs n >= 3");
  IndexList order(n);
  std::iota(order.begin(), order.end(), std::int64_t{0});
  Rng rng(seed, 0, Slot::kShuffle);
  fisher_yates(order, rng);
  const std::size_t nv = std::min(portion(n, ratios[1]), n);
  const std::size_t nt = std::min(portion(n, ratios[2]), n - nv);
  PartitionResult p;
  p.strategy = "iid";
  p.params = {{"ratios", ratios}, {"seed", seed}};
  p.valid.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(nv));
  p.test.assign(order.begin() + static_cast<std::ptrdiff_t>(nv),
                order.begin() + static_cast<std::ptrdiff_t>(nv + nt));
  p.train.assign(order.begin() + static_cast<std::ptrdiff_t>(nv + nt), order.end());
  finish(p);
  return p;
}

PartitionResult split_stratified_continuous(std::span<const double> values, double lo_pct,
                                            double hi_pct) {
  if (!(lo_pct >= 0 && hi_pct >= 0 && lo_pct + hi_pct < 1))
    throw ConfigError("stratified split needs lo_pct, hi_pct >= 0 and lo_pct + hi_pct < 1");
  check_values(values, "stratified split");
  const std::size_t n = values.size();
  const auto order = rank_order(values);
  const std::size_t nv = portion(n, lo_pct), nt = portion(n, hi_pct);
  PartitionResult p;
  p.strategy = "stratified";
  p.params = {{"lo_pct", lo_pct}, {"hi_pct", hi_pct}};
  for (std::size_t r = 0; r < n; ++r) {
    const auto idx = static_cast<std::int64_t>(order[r]);
    if (r < nv) p.valid.push_back(idx);
    else if (r >= n - nt) p.test.push_back(idx);
    else p.train.push_back(idx);
  }
  finish(p);
  return p;
}

PartitionResult split_stratified_discrete(std::span<const std::string> values, Ratios ratios,
                                          std::uint64_t seed) {
  check_ratios(ratios);
  std::map<std::string, IndexList> groups;
  for (std::size_t i = 0; i < values.size(); ++i) groups[values[i]].push_back(static_cast<std::int64_t>(i));
  if (groups.size() < 3) throw ConfigError("discrete stratified split needs at least 3 categories");

  std::vector<const std::pair<const std::string, IndexList>*> cats;
  for (const auto& g : groups) cats.push_back(&g);
  Rng rng(seed, 0, Slot::kShuffle);
  for (std::size_t i = cats.size(); i > 1; --i) std::swap(cats[i - 1], cats[rng.below(i)]);
  std::stable_sort(cats.begin(), cats.end(),
                   [](const auto* x, const auto* y) { return x->second.size() > y->second.size(); });

  const double n = static_cast<double>(values.size());
  std::array<double, 3> mass{0, 0, 0};
  std::array<IndexList*, 3> dest;
  PartitionResult p;
  dest = {&p.train, &p.valid, &p.test};
  std::array<std::vector<std::string>, 3> names;
  for (const auto* c : cats) {
    int best = 0;
    double best_deficit = -1e300;
    for (int s = 0; s < 3; ++s) {
      const double deficit = ratios[s] * n - mass[s];
      if (deficit > best_deficit) best_deficit = deficit, best = s;
    }
    mass[best] += static_cast<double>(c->second.size());
    dest[best]->insert(dest[best]->end(), c->second.begin(), c->second.end());
    names[best].push_back(c->first);
  }
  for (auto& v : names) std::sort(v.begin(), v.end());
  p.strategy = "stratified-discrete";
  p.params = {{"ratios", ratios},
              {"seed", seed},
              {"categories", {{"train", names[0]}, {"valid", names[1]}, {"test", names[2]}}}};
  finish(p);
  return p;
}

PartitionResult split_compositional(std::span<const double> a, std::span<const double> b, int grid) {
  if (a.size() != b.size()) throw ConfigError("compositional split: attribute lengths differ");
  if (grid < 2) throw ConfigError("compositional split: grid must be >= 2");
  check_values(a, "compositional split");
  check_values(b, "compositional split");
  const std::size_t n = a.size();
  auto bands = [&](std::span<const double> v) {
    const auto order = rank_order(v);
    std::vector<int> band(n);
    for (std::size_t r = 0; r < n; ++r)
      band[order[r]] = static_cast<int>(r * static_cast<std::size_t>(grid) / n);
    return band;
  };
  const auto ba = bands(a), bb = bands(b);
  PartitionResult p;
  p.strategy = "compositional";
  p.params = {{"grid", grid}};
  for (std::size_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::int64_t>(i);
    if (ba[i] == bb[i]) p.test.push_back(idx);
    else if (bb[i] == (ba[i] + 1) % grid) p.valid.push_back(idx);
    else p.train.push_back(idx);
  }
  finish(p);
  return p;
}

double ks_statistic(std::vector<double> x, std::vector<double> y) {
  if (x.empty() || y.empty()) return 1.0;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v) ++i;
    while (j < y.size() && y[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return d;
}

std::vector<double> gather(std::span<const double> values, const IndexList& indices) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(values[static_cast<std::size_t>(i)]);
  return out;
}

void check_partition(const PartitionResult& p, std::size_t n) {
  std::vector<char> seen(n, 0);
  for (const IndexList* s : {&p.train, &p.valid, &p.test}) {
    for (auto i : *s) {
      if (i < 0 || static_cast<std::size_t>(i) >= n) throw FormatError("split index out of range");
      if (seen[static_cast<std::size_t>(i)]++) throw FormatError("split sets overlap");
    }
  }
  if (p.size() != n) throw FormatError("split sets do not cover every sample");
}

}  // namespace symgen

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace symgen {

using IndexList = std::vector<std::int64_t>;

/// (train, valid, test) fractions.
using Ratios = std::array<double, 3>;
inline constexpr Ratios kDefaultRatios{0.6, 0.2, 0.2};

struct PartitionResult {
  IndexList train, valid, test;  ///< each sorted ascending
  std::string strategy;
  nlohmann::json params = nlohmann::json::object();
  std::vector<std::string> attributes;

  std::size_t size() const { return train.size() + valid.size() + test.size(); }
  nlohmann::json to_json() const;
  static PartitionResult from_json(const nlohmann::json& j);
  bool operator==(const PartitionResult&) const = default;
};

/// Seeded shuffle, then valid = round(n * rv), test = round(n * rt), train = rest,
/// so each split is within one sample of its share.
PartitionResult split_iid(std::size_t n, Ratios ratios, std::uint64_t seed);

/// Lowest lo_pct of `values` to valid, highest hi_pct to test. Ties are
/// ordered by index.
PartitionResult split_stratified_continuous(std::span<const double> values, double lo_pct = 0.2,
                                            double hi_pct = 0.2);

/// Whole categories go to one split each, largest first, to the split whose
/// sample mass is furthest below target.
PartitionResult split_stratified_discrete(std::span<const std::string> values, Ratios ratios,
                                          std::uint64_t seed);

/// Rank-quantile grid of `grid` x `grid` cells over (a, b). Cell (i, j) goes
/// to test when i == j, to valid when j == (i + 1) mod grid, else to train.
/// Each split sees every quantile band of both marginals while the joint
/// cells held out for test never occur in train.
PartitionResult split_compositional(std::span<const double> a, std::span<const double> b,
                                    int grid = 5);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> x, std::vector<double> y);

/// Gathers values[idx] for idx in `indices`.
std::vector<double> gather(std::span<const double> values, const IndexList& indices);

/// Throws FormatError unless the three sets partition 0..n-1.
void check_partition(const PartitionResult& p, std::size_t n);

}  // namespace symgen

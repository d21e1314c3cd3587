#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tweetforge/eval/metrics.hpp"

namespace tweetforge::eval {

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> valid;  // ascending
};

/// Seeded Fisher-Yates shuffle of [0, n); the first round-half-even(fraction * n)
/// shuffled indices form the validation set. Both parts keep input order.
SplitIndices split_indices(std::size_t n, double fraction, std::uint64_t seed);

template <class T>
std::pair<std::vector<T>, std::vector<T>> split_train_valid(std::span<const T> items, double fraction,
                                                            std::uint64_t seed) {
  const auto idx = split_indices(items.size(), fraction, seed);
  std::pair<std::vector<T>, std::vector<T>> out;
  for (auto i : idx.train) out.first.push_back(items[i]);
  for (auto i : idx.valid) out.second.push_back(items[i]);
  return out;
}

struct EarlyStop {
  std::size_t best_epoch = 0;  // 1-based
  std::size_t stop_epoch = 0;  // 1-based
  friend bool operator==(const EarlyStop&, const EarlyStop&) = default;
};

/// Higher is better; only a strict improvement moves the best epoch. Training
/// stops at the first epoch `patience` epochs past the best, else at the last.
EarlyStop early_stop(std::span<const double> val_scores, std::size_t patience = 5);

struct MetricSummary {
  double mean = 0;
  double std = 0;  // sample standard deviation; 0 for one run
  double min = 0;
  double max = 0;
  friend bool operator==(const MetricSummary&, const MetricSummary&) = default;
};

struct RunAggregate {
  std::string task;
  std::size_t runs = 0;
  std::map<std::string, MetricSummary> metrics;
  friend bool operator==(const RunAggregate&, const RunAggregate&) = default;
};

// Per-metric mean and sample std. Values are summed in sorted order, so the
// result does not depend on run order.
RunAggregate aggregate_runs(std::span<const MetricReport> reports);

}  // namespace tweetforge::eval

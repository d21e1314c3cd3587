#include "tweetforge/eval/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tweetforge/common.hpp"
#include "tweetforge/rng.hpp"

namespace tweetforge::eval {

SplitIndices split_indices(std::size_t n, double fraction, std::uint64_t seed) {
  if (n < 2) throw ConfigError("cannot split fewer than 2 items");
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("split fraction must be within (0, 1)");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = CounterRng::keyed({seed, 0x73706C6974ull});
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
  const auto k = static_cast<std::size_t>(std::nearbyint(fraction * static_cast<double>(n)));
  SplitIndices out;
  out.valid.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  out.train.assign(order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
  std::sort(out.valid.begin(), out.valid.end());
  std::sort(out.train.begin(), out.train.end());
  return out;
}

EarlyStop early_stop(std::span<const double> val_scores, std::size_t patience) {
  if (val_scores.empty()) throw ConfigError("early_stop needs at least one score");
  if (patience == 0) throw ConfigError("patience must be at least 1");
  EarlyStop r{1, val_scores.size()};
  double best = val_scores[0];
  for (std::size_t e = 1; e <= val_scores.size(); ++e) {
    if (val_scores[e - 1] > best) {
      best = val_scores[e - 1];
      r.best_epoch = e;
    }
    if (e - r.best_epoch == patience) {
      r.stop_epoch = e;
      break;
    }
  }
  return r;
}

RunAggregate aggregate_runs(std::span<const MetricReport> reports) {
  if (reports.empty()) throw ConfigError("aggregate_runs needs at least one report");
  RunAggregate agg;
  agg.task = reports.front().task;
  agg.runs = reports.size();
  for (const auto& r : reports) {
    if (r.task != agg.task) throw FormatError("reports mix tasks '" + agg.task + "' and '" + r.task + "'");
    bool same = r.metrics.size() == reports.front().metrics.size();
    for (const auto& [name, v] : reports.front().metrics) same = same && r.metrics.contains(name);
    if (!same) throw FormatError("reports do not share the same metric names");
  }
  for (const auto& [name, unused] : reports.front().metrics) {
    std::vector<double> v;
    for (const auto& r : reports) v.push_back(r.metrics.at(name));
    std::sort(v.begin(), v.end());
    MetricSummary s;
    s.min = v.front();
    s.max = v.back();
    double sum = 0;
    for (double x : v) sum += x;
    s.mean = std::clamp(sum / static_cast<double>(v.size()), s.min, s.max);
    if (v.size() > 1) {
      double ss = 0;
      for (double x : v) ss += (x - s.mean) * (x - s.mean);
      s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    agg.metrics[name] = s;
  }
  return agg;
}

}  // namespace tweetforge::eval

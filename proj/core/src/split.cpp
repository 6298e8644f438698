#include <algorithm>
#include <numeric>
#include <vector>

#include "forestflow/forest.hpp"
#include "split_finder.hpp"

namespace forestflow {

double gini(std::span<const std::uint32_t> class_counts) {
  double n = 0.0;
  double sum_sq = 0.0;
  for (std::uint32_t c : class_counts) {
    n += c;
    sum_sq += static_cast<double>(c) * c;
  }
  if (n == 0.0) return 0.0;
  return 1.0 - sum_sq / (n * n);
}

namespace detail {

std::optional<Split> SplitFinder::find(const Dataset& data, std::span<const RowIndex> rows,
                                       std::span<const CovariateId> candidates,
                                       std::uint32_t min_child_size) {
  const std::size_t n = rows.size();
  const std::size_t n_classes = data.n_classes();
  if (n < 2 || candidates.empty()) return std::nullopt;
  const std::size_t min_child = std::max<std::uint32_t>(1, min_child_size);
  if (n < 2 * min_child) return std::nullopt;

  parent_.assign(n_classes, 0);
  for (RowIndex r : rows) ++parent_[data.responses[r]];
  double parent_sq = 0.0;
  for (std::uint32_t c : parent_) parent_sq += static_cast<double>(c) * c;
  const double nd = static_cast<double>(n);
  const double parent_gini = 1.0 - parent_sq / (nd * nd);
  if (parent_gini <= 0.0) return std::nullopt;

  sorted_candidates_.assign(candidates.begin(), candidates.end());
  std::sort(sorted_candidates_.begin(), sorted_candidates_.end());

  // Maximise sum_left_sq / n_left + sum_right_sq / n_right, which equals
  // n * (1 - weighted child Gini).
  std::optional<Split> best;
  double best_score = 0.0;
  for (CovariateId cov : sorted_candidates_) {
    pairs_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      pairs_[i] = {data.at(rows[i], cov), data.responses[rows[i]]};
    }
    std::sort(pairs_.begin(), pairs_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (pairs_.front().first == pairs_.back().first) continue;

    left_.assign(n_classes, 0);
    right_ = parent_;
    double left_sq = 0.0;
    double right_sq = parent_sq;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const ClassId k = pairs_[i].second;
      left_sq += 2.0 * left_[k] + 1.0;
      right_sq -= 2.0 * right_[k] - 1.0;
      ++left_[k];
      --right_[k];
      const std::size_t n_left = i + 1;
      const std::size_t n_right = n - n_left;
      if (pairs_[i].first == pairs_[i + 1].first) continue;
      if (n_left < min_child || n_right < min_child) continue;
      const double score = left_sq / static_cast<double>(n_left) +
                           right_sq / static_cast<double>(n_right);
      if (!best || score > best_score) {
        const double lo = pairs_[i].first;
        const double hi = pairs_[i + 1].first;
        double threshold = std::midpoint(lo, hi);
        if (threshold >= hi) threshold = lo;
        best_score = score;
        best = Split{cov, threshold, 0.0};
      }
    }
  }
  if (!best) return std::nullopt;
  const double decrease = best_score / nd - parent_sq / (nd * nd);
  if (!(decrease > kMinImpurityDecrease)) return std::nullopt;
  best->impurity_decrease = decrease;
  return best;
}

}  // namespace detail

std::optional<Split> best_split(const Dataset& data, std::span<const RowIndex> rows,
                                std::span<const CovariateId> candidates,
                                std::uint32_t min_child_size) {
  detail::SplitFinder finder;
  return finder.find(data, rows, candidates, min_child_size);
}

}  // namespace forestflow

#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "forestflow/forest.hpp"

namespace forestflow::detail {

// Decreases at or below this are treated as no improvement; floating-point
// noise on an exact zero gain stays well under it.
inline constexpr double kMinImpurityDecrease = 1e-12;

// best_split with scratch buffers reused across nodes of one tree.
class SplitFinder {
 public:
  std::optional<Split> find(const Dataset& data, std::span<const RowIndex> rows,
                            std::span<const CovariateId> candidates,
                            std::uint32_t min_child_size);

 private:
  std::vector<std::pair<double, ClassId>> pairs_;
  std::vector<std::uint32_t> parent_, left_, right_;
  std::vector<CovariateId> sorted_candidates_;
};

}  // namespace forestflow::detail

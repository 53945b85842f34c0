#pragma once

#include "amppere/machine/types.hpp"

#include <cstdint>
#include <vector>

namespace amppere {

enum class ShiftDirection : std::uint8_t { kLeft, kRight };

/// Public data movement: every output cell copies one input cell or a public
/// constant. Linear indices are column-major, matching Eigen's default
/// storage. Backends execute plans locally (no interaction is ever needed,
/// since the plan depends only on public shapes and parameters).
struct GatherPlan {
  static constexpr int kFill = -1;

  struct Source {
    int operand = kFill;
    Index linear = 0;
  };

  Shape out;
  std::vector<Source> sources;
  std::int64_t fill = 0;
};

namespace layout {

GatherPlan transpose(Shape in);
GatherPlan rotate(Index n, Index by, ShiftDirection dir);
GatherPlan shift(Index n, Index by, ShiftDirection dir, std::int64_t fill);
GatherPlan broadcast(Shape out);
GatherPlan concat(Index n1, Index n2);
GatherPlan slice(Index n, Index begin, Index length);
GatherPlan tile(Index n, Index times);
GatherPlan repeatEach(Index n, Index times);
GatherPlan pad(Index n, Index length, std::int64_t fill);
GatherPlan place(Shape mat, Index row, Index col);
GatherPlan reshape(Shape in, Shape out);

}  // namespace layout
}  // namespace amppere

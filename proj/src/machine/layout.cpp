#include "amppere/machine/layout.hpp"

#include "amppere/machine/errors.hpp"

namespace amppere::layout {
namespace {

GatherPlan sized(Shape out) {
  GatherPlan plan;
  plan.out = out;
  plan.sources.resize(static_cast<std::size_t>(out.size()));
  return plan;
}

Index wrap(Index i, Index n) { return ((i % n) + n) % n; }

}  // namespace

GatherPlan transpose(Shape in) {
  GatherPlan plan = sized({in.cols, in.rows});
  for (Index r = 0; r < in.rows; ++r) {
    for (Index c = 0; c < in.cols; ++c) {
      // out(c, r) = in(r, c)
      plan.sources[static_cast<std::size_t>(c + r * in.cols)] = {0, r + c * in.rows};
    }
  }
  return plan;
}

GatherPlan rotate(Index n, Index by, ShiftDirection dir) {
  GatherPlan plan = sized(vectorShape(n));
  for (Index i = 0; i < n; ++i) {
    const Index from = dir == ShiftDirection::kRight ? wrap(i - by, n) : wrap(i + by, n);
    plan.sources[static_cast<std::size_t>(i)] = {0, from};
  }
  return plan;
}

GatherPlan shift(Index n, Index by, ShiftDirection dir, std::int64_t fill) {
  GatherPlan plan = sized(vectorShape(n));
  plan.fill = fill;
  for (Index i = 0; i < n; ++i) {
    const Index from = dir == ShiftDirection::kRight ? i - by : i + by;
    if (from >= 0 && from < n) {
      plan.sources[static_cast<std::size_t>(i)] = {0, from};
    }
  }
  return plan;
}

GatherPlan broadcast(Shape out) {
  GatherPlan plan = sized(out);
  for (auto& s : plan.sources) s = {0, 0};
  return plan;
}

GatherPlan concat(Index n1, Index n2) {
  GatherPlan plan = sized(vectorShape(n1 + n2));
  for (Index i = 0; i < n1; ++i) plan.sources[static_cast<std::size_t>(i)] = {0, i};
  for (Index i = 0; i < n2; ++i) plan.sources[static_cast<std::size_t>(n1 + i)] = {1, i};
  return plan;
}

GatherPlan slice(Index n, Index begin, Index length) {
  if (begin < 0 || length < 0 || begin + length > n) {
    throw ShapeMismatch("slice [" + std::to_string(begin) + ", +" + std::to_string(length) +
                        ") out of range for length " + std::to_string(n));
  }
  GatherPlan plan = sized(vectorShape(length));
  for (Index i = 0; i < length; ++i) plan.sources[static_cast<std::size_t>(i)] = {0, begin + i};
  return plan;
}

GatherPlan tile(Index n, Index times) {
  GatherPlan plan = sized(vectorShape(n * times));
  for (Index t = 0; t < times; ++t) {
    for (Index i = 0; i < n; ++i) plan.sources[static_cast<std::size_t>(t * n + i)] = {0, i};
  }
  return plan;
}

GatherPlan repeatEach(Index n, Index times) {
  GatherPlan plan = sized(vectorShape(n * times));
  for (Index i = 0; i < n; ++i) {
    for (Index t = 0; t < times; ++t) plan.sources[static_cast<std::size_t>(i * times + t)] = {0, i};
  }
  return plan;
}

GatherPlan pad(Index n, Index length, std::int64_t fill) {
  if (length < n) throw ShapeMismatch("pad target shorter than input");
  GatherPlan plan = sized(vectorShape(length));
  plan.fill = fill;
  for (Index i = 0; i < n; ++i) plan.sources[static_cast<std::size_t>(i)] = {0, i};
  return plan;
}

GatherPlan place(Shape mat, Index row, Index col) {
  if (row < 0 || row >= mat.rows || col < 0 || col >= mat.cols) {
    throw ShapeMismatch("place position outside " + mat.str());
  }
  GatherPlan plan = sized(mat);
  for (Index i = 0; i < mat.size(); ++i) plan.sources[static_cast<std::size_t>(i)] = {0, i};
  plan.sources[static_cast<std::size_t>(row + col * mat.rows)] = {1, 0};
  return plan;
}

GatherPlan reshape(Shape in, Shape out) {
  if (in.size() != out.size()) throw ShapeMismatch("reshape " + in.str() + " -> " + out.str());
  GatherPlan plan = sized(out);
  for (Index i = 0; i < out.size(); ++i) plan.sources[static_cast<std::size_t>(i)] = {0, i};
  return plan;
}

}  // namespace amppere::layout

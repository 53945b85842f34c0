#pragma once

#include "amppere/machine/backend.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace amppere {

struct TraceMismatch {
  std::size_t position = 0;
  std::string left;
  std::string right;
};

/// First position where two traces differ, if any.
std::optional<TraceMismatch> diffTraces(const Trace& a, const Trace& b);

/// Twin-run check: runs `program` on two fresh contexts with variant 0 and 1
/// (same public shapes, different private contents) and raises
/// TaintViolation unless traces and ledgers agree. Exceptions raised by the
/// program itself, including TaintViolation from a branch, propagate.
void assertOblivious(const std::function<std::unique_ptr<Backend>()>& makeContext,
                     const std::function<void(Backend&, int variant)>& program);

}  // namespace amppere

#include "amppere/backends/oblivious.hpp"

#include "amppere/machine/errors.hpp"

#include <algorithm>

namespace amppere {

std::optional<TraceMismatch> diffTraces(const Trace& a, const Trace& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (!(a[i] == b[i])) return TraceMismatch{i, describe(a[i]), describe(b[i])};
  }
  if (a.size() == b.size()) return std::nullopt;
  return TraceMismatch{n, n < a.size() ? describe(a[n]) : "<end>",
                       n < b.size() ? describe(b[n]) : "<end>"};
}

void assertOblivious(const std::function<std::unique_ptr<Backend>()>& makeContext,
                     const std::function<void(Backend&, int variant)>& program) {
  auto first = makeContext();
  auto second = makeContext();
  first->setTraceRecording(true);
  second->setTraceRecording(true);
  program(*first, 0);
  program(*second, 1);
  if (auto m = diffTraces(first->trace(), second->trace())) {
    throw TaintViolation("trace depends on private contents",
                         "position " + std::to_string(m->position) + ": " + m->left + " vs " +
                             m->right);
  }
  if (!(first->ledger() == second->ledger())) {
    throw TaintViolation("ledger depends on private contents", "ledger");
  }
}

}  // namespace amppere

#pragma once

#include "amppere/backends/factory.hpp"
#include "amppere/machine/ops.hpp"

#include <memory>
#include <string>
#include <vector>

namespace amppere::testing {

struct NamedContext {
  std::string label;
  BackendKind kind;
  Profile profile;
};

inline std::vector<NamedContext> exactContexts(bool withMpc = true) {
  std::vector<NamedContext> out{{"clear:generic", BackendKind::kClear, Profile::kGeneric},
                                {"sim:generic", BackendKind::kObliviousSim, Profile::kGeneric},
                                {"sim:sharemind", BackendKind::kObliviousSim, Profile::kSharemind}};
  if (withMpc) out.push_back({"mpc", BackendKind::kMpc, Profile::kGeneric});
  return out;
}

inline std::unique_ptr<Backend> make(const NamedContext& c, std::uint64_t seed = 1) {
  BackendOptions opts;
  opts.seed = seed;
  return makeBackend(c.kind, c.profile, opts);
}

inline IntVector ivec(std::initializer_list<std::int64_t> xs) {
  IntVector v(static_cast<Index>(xs.size()));
  Index i = 0;
  for (auto x : xs) v(i++) = x;
  return v;
}

inline std::vector<std::int64_t> toStd(const IntVector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace amppere::testing

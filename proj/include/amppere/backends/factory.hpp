#pragma once

#include "amppere/machine/backend.hpp"
#include "amppere/mpc/runtime.hpp"

#include <memory>
#include <string_view>

namespace amppere {

enum class BackendKind : std::uint8_t { kClear, kObliviousSim, kMpc };

/// Capability profiles: a generic exact machine, a SIMD homomorphic-style
/// machine (rotations, approximate reals, division via masked reciprocal)
/// and a secret-sharing machine with equality, sort and join gates.
enum class Profile : std::uint8_t { kGeneric, kSimd, kSharemind };

std::string_view backendKindName(BackendKind k);
std::string_view profileName(Profile p);

/// Accepts `clear`, `sim`/`oblivious-sim`, `mpc`; throws Error otherwise.
BackendKind parseBackendKind(std::string_view s);
/// Accepts `generic`, `simd`/`simd-like`, `sharemind`/`sharemind-like`.
Profile parseProfile(std::string_view s);

Capabilities profileCapabilities(Profile p);

/// Builds a machine context. Approximate-domain contexts come with a
/// masked-reciprocal helper (P3) already wired. The mpc kind ignores the
/// profile and uses its own capability set.
std::unique_ptr<Backend> makeBackend(BackendKind kind, Profile profile,
                                     BackendOptions options = {},
                                     mpc::LatencyModel latency = {});

/// Per-stage, per-primitive counts of a context.
inline OpCostLedger ledgerReport(const Backend& ctx) { return ctx.ledger(); }

}  // namespace amppere

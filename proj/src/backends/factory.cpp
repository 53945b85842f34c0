#include "amppere/backends/factory.hpp"

#include "amppere/backends/plain.hpp"
#include "amppere/machine/errors.hpp"
#include "amppere/mpc/backend.hpp"

#include <random>

namespace amppere {

std::string_view backendKindName(BackendKind k) {
  switch (k) {
    case BackendKind::kClear: return "clear";
    case BackendKind::kObliviousSim: return "sim";
    case BackendKind::kMpc: return "mpc";
  }
  return "?";
}

std::string_view profileName(Profile p) {
  switch (p) {
    case Profile::kGeneric: return "generic";
    case Profile::kSimd: return "simd";
    case Profile::kSharemind: return "sharemind";
  }
  return "?";
}

BackendKind parseBackendKind(std::string_view s) {
  if (s == "clear") return BackendKind::kClear;
  if (s == "sim" || s == "oblivious-sim") return BackendKind::kObliviousSim;
  if (s == "mpc") return BackendKind::kMpc;
  throw Error("unknown backend '" + std::string(s) + "'");
}

Profile parseProfile(std::string_view s) {
  if (s == "generic") return Profile::kGeneric;
  if (s == "simd" || s == "simd-like") return Profile::kSimd;
  if (s == "sharemind" || s == "sharemind-like") return Profile::kSharemind;
  throw Error("unknown profile '" + std::string(s) + "'");
}

Capabilities profileCapabilities(Profile p) {
  Capabilities c;
  switch (p) {
    case Profile::kGeneric:
      c.nativeEq = c.rotation = c.repeatElements = c.sort = c.join = true;
      c.domain = Domain::kExact;
      break;
    case Profile::kSimd:
      c.rotation = c.repeatElements = c.division = true;
      c.domain = Domain::kApprox;
      break;
    case Profile::kSharemind:
      c.nativeEq = c.sort = c.join = c.repeatElements = true;
      c.domain = Domain::kExact;
      break;
  }
  return c;
}

std::unique_ptr<Backend> makeBackend(BackendKind kind, Profile profile, BackendOptions options,
                                     mpc::LatencyModel latency) {
  if (kind == BackendKind::kMpc) {
    return std::make_unique<mpc::MpcBackend>(mpc::MpcBackend::defaultCapabilities(), options,
                                             latency);
  }
  const Capabilities caps = profileCapabilities(profile);
  const bool oblivious = kind == BackendKind::kObliviousSim;
  const std::string name = std::string(backendKindName(kind)) + ":" + std::string(profileName(profile));
  std::unique_ptr<Backend> ctx;
  if (caps.domain == Domain::kApprox) {
    ctx = std::make_unique<ApproxPlainBackend>(name, caps, options, oblivious);
  } else {
    ctx = std::make_unique<ExactPlainBackend>(name, caps, options, oblivious);
  }
  if (caps.division) {
    auto rng = std::make_shared<std::mt19937_64>(options.seed ^ 0xa5a5a5a5a5a5a5a5ULL);
    ctx->setReciprocalHelper(ReciprocalHelper{rng, ctx->grant(Role::kP3)});
  }
  return ctx;
}

}  // namespace amppere

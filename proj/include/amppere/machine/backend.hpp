#pragma once

#include "amppere/machine/layout.hpp"
#include "amppere/machine/types.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace amppere {

/// Primitive operator kinds accounted for in ledgers and traces.
enum class Primitive : std::uint8_t {
  kEnc,
  kDec,
  kAdd,
  kSub,
  kEAdd,
  kESub,
  kEMul,
  kMul,
  kDotProduct,  // also called InnerProduct
  kLShift,
  kRShift,
  kSize,
  kTranspose,
  kEq,
  kCompare,
  kRepeat,
  kRepeatElements,
  kSort,
  kJoin,
  kBroadcast,
  kConcat,
  kSlice,
  kPlace,
  kCount,
};

constexpr std::size_t kPrimitiveCount = static_cast<std::size_t>(Primitive::kCount);

std::string_view primitiveName(Primitive p);
std::optional<Primitive> primitiveFromName(std::string_view name);

struct Capabilities {
  bool nativeEq = false;
  bool rotation = false;
  bool repeatElements = false;
  bool sort = false;
  bool join = false;
  bool division = false;  // via the masked-reciprocal protocol
  Domain domain = Domain::kExact;

  std::string str() const;
};

/// Per-primitive weights used when reducing a ledger to a single cost.
struct CostWeights {
  std::array<double, kPrimitiveCount> weight;

  CostWeights() { weight.fill(1.0); }
  double operator[](Primitive p) const { return weight[static_cast<std::size_t>(p)]; }
  double& operator[](Primitive p) { return weight[static_cast<std::size_t>(p)]; }
};

/// Primitive counts per pipeline stage.
class OpCostLedger {
 public:
  using Counts = std::array<std::uint64_t, kPrimitiveCount>;

  void record(const std::string& stage, Primitive p, std::uint64_t n = 1);
  void merge(const OpCostLedger& other);
  void clear() { stages_.clear(); }

  std::uint64_t count(Primitive p) const;
  std::uint64_t count(const std::string& stage, Primitive p) const;
  std::uint64_t total() const;
  double weightedTotal(const CostWeights& w) const;
  Counts totals() const;
  const std::map<std::string, Counts>& stages() const { return stages_; }

  /// `stage,primitive,count` rows, zero counts omitted.
  std::string csv() const;

  friend bool operator==(const OpCostLedger&, const OpCostLedger&) = default;

 private:
  std::map<std::string, Counts> stages_;
};

struct TraceEntry {
  Primitive primitive = Primitive::kEnc;
  Shape a;
  Shape b;
  std::int64_t param = 0;

  friend bool operator==(const TraceEntry&, const TraceEntry&) = default;
};

using Trace = std::vector<TraceEntry>;

std::string describe(const TraceEntry& e);

/// A decryption event: who learned what, during which stage.
struct Disclosure {
  Role role = Role::kP1;
  std::string stage;
  std::string label;
  Shape shape;
  std::vector<double> values;
};

/// Issues and validates decryption authorities for one context family.
class AuthorityRegistry {
 public:
  explicit AuthorityRegistry(std::uint64_t family) : family_(family) {}

  DecryptionAuthority grant(Role role);
  void revoke(const DecryptionAuthority& a);
  bool valid(const DecryptionAuthority& a) const;

 private:
  std::uint64_t family_;
  std::uint64_t next_ = 1;
  std::set<std::uint64_t> live_;
  mutable std::mutex mu_;
};

/// Parties taking part in the masked-reciprocal protocol: a data owner
/// supplying the random mask and a helper allowed to see the masked product.
struct ReciprocalHelper {
  std::shared_ptr<std::mt19937_64> randomness;
  DecryptionAuthority helper;
};

struct BackendOptions {
  double xi = 1e-3;  // EEq workaround offset
  bool recordTrace = true;
  std::uint64_t seed = 0x5eed;
  CostWeights weights;
};

/// A machine context: holds the backend realization of the primitive
/// operator set and the public accounting around it (ledger, trace,
/// disclosure log). Single-threaded; see clone() for parallel work.
class Backend {
 public:
  Backend(std::string name, Capabilities caps, BackendOptions options);
  virtual ~Backend() = default;

  Backend(const Backend&) = delete;
  Backend& operator=(const Backend&) = delete;

  const std::string& name() const { return name_; }
  const Capabilities& capabilities() const { return caps_; }
  Domain domain() const { return caps_.domain; }
  std::uint64_t family() const { return family_; }
  const BackendOptions& options() const { return options_; }

  // Enc / Dec
  Value enc(const PlainMatrix& plain);
  PlainMatrix dec(const Value& v, const DecryptionAuthority& authority,
                  std::string_view label = "");

  // Arithmetic. Add/Sub are recorded as EAdd/ESub for non-scalar operands.
  Value add(const Value& a, const Value& b);
  Value sub(const Value& a, const Value& b);
  Value emul(const Value& a, const Value& b);
  Value mul(const Value& a, const Value& b);  // matrix product
  Value dot(const Value& a, const Value& b);  // vectors -> scalar
  Value eq(const Value& a, const Value& b);
  Value greater(const Value& a, const Value& b);

  // Data movement
  Value rotate(const Value& v, Index by, ShiftDirection dir);
  Value shift(const Value& v, Index by, ShiftDirection dir, std::int64_t fill);
  Value transpose(const Value& v);
  Value broadcast(const Value& scalar, Shape out);
  Value concat(const Value& a, const Value& b);
  Value slice(const Value& v, Index begin, Index length);
  Value repeat(const Value& v, Index times);
  Value repeatElements(const Value& v, Index times);
  Value place(const Value& mat, Index row, Index col, const Value& scalar);
  Index size(const Value& v);

  // Oblivious gates
  Value sort(const Value& v);
  Value joinCount(const Value& a, const Value& b);

  /// Host-level conditional on private content. Only the cleartext oracle
  /// permits it; oblivious contexts raise TaintViolation.
  bool branch(const Value& v, std::string_view site);

  /// Direct content access for oracle-mode precondition checks.
  std::optional<PlainMatrix> inspect(const Value& v);

  DecryptionAuthority grant(Role role) { return authorities_->grant(role); }
  void revoke(const DecryptionAuthority& a) { authorities_->revoke(a); }
  bool authorityValid(const DecryptionAuthority& a) const { return authorities_->valid(a); }

  void setReciprocalHelper(ReciprocalHelper helper) { helper_ = std::move(helper); }
  const std::optional<ReciprocalHelper>& reciprocalHelper() const { return helper_; }

  void setStage(std::string stage) { stage_ = std::move(stage); }
  const std::string& stage() const { return stage_; }

  const OpCostLedger& ledger() const { return ledger_; }
  const Trace& trace() const { return trace_; }
  const std::vector<Disclosure>& disclosures() const { return disclosures_; }
  void resetAccounting();
  void setTraceRecording(bool on) { options_.recordTrace = on; }

  /// Independent context of the same family (values interoperate). Returns
  /// nullptr when the backend cannot be cloned.
  std::unique_ptr<Backend> clone() const;

  /// Re-homes a value produced by a clone onto this context.
  Value adopt(const Value& v);

  /// Folds a clone's ledger and disclosures into this context.
  void absorb(const Backend& clone);

 protected:
  using CellsPtr = std::shared_ptr<const Cells>;

  virtual CellsPtr doEnc(const PlainMatrix& plain, Shape shape) = 0;
  virtual PlainMatrix doDec(const Value& v) = 0;
  virtual CellsPtr doAdd(const Value& a, const Value& b) = 0;
  virtual CellsPtr doSub(const Value& a, const Value& b) = 0;
  virtual CellsPtr doEMul(const Value& a, const Value& b) = 0;
  virtual CellsPtr doMul(const Value& a, const Value& b) = 0;
  virtual CellsPtr doDot(const Value& a, const Value& b) = 0;
  virtual CellsPtr doEq(const Value& a, const Value& b) = 0;
  virtual CellsPtr doGreater(const Value& a, const Value& b) = 0;
  virtual CellsPtr doGather(const GatherPlan& plan, const std::vector<const Value*>& operands) = 0;
  virtual CellsPtr doSort(const Value& v) = 0;
  virtual CellsPtr doJoinCount(const Value& a, const Value& b) = 0;
  virtual bool doBranch(const Value& v, std::string_view site) = 0;
  virtual std::optional<PlainMatrix> doInspect(const Value& v) = 0;
  virtual std::unique_ptr<Backend> doClone() const { return nullptr; }

  static const Cells& cellsOf(const Value& v) { return *v.cells_; }

  /// Clones share family and authority registry with their parent.
  void joinFamily(const Backend& parent);

 private:
  Value make(Shape shape, CellsPtr cells);
  void check(const Value& v) const;
  void checkSame(const Value& a, const Value& b, const char* op) const;
  void record(Primitive p, Shape a, Shape b = {}, std::int64_t param = 0);
  Value gather(Primitive p, const GatherPlan& plan, std::vector<const Value*> operands,
               std::int64_t param);
  void require(bool cap, const char* what) const;

  std::string name_;
  Capabilities caps_;
  BackendOptions options_;
  std::uint64_t family_;
  std::shared_ptr<AuthorityRegistry> authorities_;
  std::optional<ReciprocalHelper> helper_;
  std::string stage_ = "default";
  OpCostLedger ledger_;
  Trace trace_;
  std::vector<Disclosure> disclosures_;
};

/// Sets the ledger stage for the lifetime of the scope.
class StageScope {
 public:
  StageScope(Backend& ctx, std::string stage) : ctx_(ctx), previous_(ctx.stage()) {
    ctx_.setStage(std::move(stage));
  }
  ~StageScope() { ctx_.setStage(previous_); }

  StageScope(const StageScope&) = delete;
  StageScope& operator=(const StageScope&) = delete;

 private:
  Backend& ctx_;
  std::string previous_;
};

/// Revokes the authority when the scope ends.
class ScopedAuthority {
 public:
  ScopedAuthority(Backend& ctx, Role role) : ctx_(ctx), authority_(ctx.grant(role)) {}
  ~ScopedAuthority() { ctx_.revoke(authority_); }

  ScopedAuthority(const ScopedAuthority&) = delete;
  ScopedAuthority& operator=(const ScopedAuthority&) = delete;

  const DecryptionAuthority& get() const { return authority_; }

 private:
  Backend& ctx_;
  DecryptionAuthority authority_;
};

}  // namespace amppere

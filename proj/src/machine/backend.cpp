#include "amppere/machine/backend.hpp"

#include "amppere/machine/errors.hpp"

#include <atomic>
#include <sstream>

namespace amppere {
namespace {

std::atomic<std::uint64_t> g_next_family{1};

constexpr std::array<std::string_view, kPrimitiveCount> kPrimitiveNames = {
    "Enc",        "Dec",       "Add",       "Sub",       "EAdd",   "ESub",
    "EMul",       "Mul",       "DotProduct", "LShift",   "RShift", "Size",
    "Transpose",  "EEq",       "Compare",   "Repeat",    "RepeatElements",
    "Sort",       "Join",      "Broadcast", "Concat",    "Slice",  "Place",
};

std::vector<double> flatten(const PlainMatrix& m) {
  std::vector<double> out;
  std::visit(
      [&](const auto& mat) {
        out.reserve(static_cast<std::size_t>(mat.size()));
        for (Index i = 0; i < mat.size(); ++i) out.push_back(static_cast<double>(mat.data()[i]));
      },
      m);
  return out;
}

Shape shapeOf(const PlainMatrix& m) {
  return std::visit([](const auto& mat) { return Shape{mat.rows(), mat.cols()}; }, m);
}

}  // namespace

const char* domainName(Domain d) { return d == Domain::kExact ? "exact-int64" : "approx-fixed"; }

const char* roleName(Role r) {
  switch (r) {
    case Role::kP1: return "P1";
    case Role::kP2: return "P2";
    case Role::kP3: return "P3";
  }
  return "?";
}

std::string Shape::str() const {
  return "(" + std::to_string(rows) + "x" + std::to_string(cols) + ")";
}

Backend& Value::context() const {
  if (owner_ == nullptr) throw Error("use of an empty private handle");
  return *owner_;
}

PrivateScalar::PrivateScalar(Value v) : v_(std::move(v)) {
  if (!v_.shape().isScalar()) throw ShapeMismatch("scalar handle built from " + v_.shape().str());
}

PrivateVector::PrivateVector(Value v) : v_(std::move(v)) {
  if (!v_.shape().isVector()) throw ShapeMismatch("vector handle built from " + v_.shape().str());
}

PrivateMatrix::PrivateMatrix(Value v) : v_(std::move(v)) {}

std::string_view primitiveName(Primitive p) { return kPrimitiveNames[static_cast<std::size_t>(p)]; }

std::optional<Primitive> primitiveFromName(std::string_view name) {
  for (std::size_t i = 0; i < kPrimitiveCount; ++i) {
    if (kPrimitiveNames[i] == name) return static_cast<Primitive>(i);
  }
  return std::nullopt;
}

std::string Capabilities::str() const {
  std::ostringstream os;
  os << "{";
  const char* sep = "";
  auto flag = [&](bool on, const char* name) {
    if (on) {
      os << sep << name;
      sep = ",";
    }
  };
  flag(nativeEq, "nativeEq");
  flag(rotation, "rotation");
  flag(repeatElements, "repeatElements");
  flag(sort, "sort");
  flag(join, "join");
  flag(division, "division");
  os << "} " << domainName(domain);
  return os.str();
}

// ---------------------------------------------------------------------------
// Ledger

void OpCostLedger::record(const std::string& stage, Primitive p, std::uint64_t n) {
  auto [it, inserted] = stages_.try_emplace(stage);
  if (inserted) it->second.fill(0);
  it->second[static_cast<std::size_t>(p)] += n;
}

void OpCostLedger::merge(const OpCostLedger& other) {
  for (const auto& [stage, counts] : other.stages_) {
    for (std::size_t i = 0; i < kPrimitiveCount; ++i) {
      if (counts[i] != 0) record(stage, static_cast<Primitive>(i), counts[i]);
    }
  }
}

std::uint64_t OpCostLedger::count(Primitive p) const {
  std::uint64_t n = 0;
  for (const auto& [stage, counts] : stages_) n += counts[static_cast<std::size_t>(p)];
  return n;
}

std::uint64_t OpCostLedger::count(const std::string& stage, Primitive p) const {
  auto it = stages_.find(stage);
  return it == stages_.end() ? 0 : it->second[static_cast<std::size_t>(p)];
}

OpCostLedger::Counts OpCostLedger::totals() const {
  Counts out{};
  for (const auto& [stage, counts] : stages_) {
    for (std::size_t i = 0; i < kPrimitiveCount; ++i) out[i] += counts[i];
  }
  return out;
}

std::uint64_t OpCostLedger::total() const {
  std::uint64_t n = 0;
  for (auto c : totals()) n += c;
  return n;
}

double OpCostLedger::weightedTotal(const CostWeights& w) const {
  const Counts t = totals();
  double sum = 0;
  for (std::size_t i = 0; i < kPrimitiveCount; ++i) sum += w.weight[i] * static_cast<double>(t[i]);
  return sum;
}

std::string OpCostLedger::csv() const {
  std::ostringstream os;
  os << "stage,primitive,count\n";
  for (const auto& [stage, counts] : stages_) {
    for (std::size_t i = 0; i < kPrimitiveCount; ++i) {
      if (counts[i] != 0) os << stage << ',' << kPrimitiveNames[i] << ',' << counts[i] << '\n';
    }
  }
  return os.str();
}

std::string describe(const TraceEntry& e) {
  std::ostringstream os;
  os << primitiveName(e.primitive) << ' ' << e.a.str() << ' ' << e.b.str() << ' ' << e.param;
  return os.str();
}

// ---------------------------------------------------------------------------
// Authorities

DecryptionAuthority AuthorityRegistry::grant(Role role) {
  std::lock_guard lock(mu_);
  const std::uint64_t token = next_++;
  live_.insert(token);
  return DecryptionAuthority(family_, token, role);
}

void AuthorityRegistry::revoke(const DecryptionAuthority& a) {
  std::lock_guard lock(mu_);
  if (a.family() == family_) live_.erase(a.token());
}

bool AuthorityRegistry::valid(const DecryptionAuthority& a) const {
  std::lock_guard lock(mu_);
  return a.family() == family_ && live_.count(a.token()) != 0;
}

// ---------------------------------------------------------------------------
// Backend

Backend::Backend(std::string name, Capabilities caps, BackendOptions options)
    : name_(std::move(name)),
      caps_(caps),
      options_(options),
      family_(g_next_family.fetch_add(1)),
      authorities_(std::make_shared<AuthorityRegistry>(family_)) {}

void Backend::joinFamily(const Backend& parent) {
  family_ = parent.family_;
  authorities_ = parent.authorities_;
  stage_ = parent.stage_;
  options_ = parent.options_;
}

Value Backend::make(Shape shape, CellsPtr cells) {
  return Value(this, family_, shape, caps_.domain, std::move(cells));
}

void Backend::check(const Value& v) const {
  if (!v.valid()) throw Error("use of an empty private handle");
  if (v.family() != family_) {
    throw ContextMismatch("value from context family " + std::to_string(v.family()) +
                          " used on family " + std::to_string(family_));
  }
}

void Backend::checkSame(const Value& a, const Value& b, const char* op) const {
  check(a);
  check(b);
  if (a.shape() != b.shape()) {
    throw ShapeMismatch(std::string(op) + ": " + a.shape().str() + " vs " + b.shape().str());
  }
}

void Backend::require(bool cap, const char* what) const {
  if (!cap) {
    throw CapabilityUnsupported(std::string(what) + " not supported by backend " + name_ + " " +
                                caps_.str());
  }
}

void Backend::record(Primitive p, Shape a, Shape b, std::int64_t param) {
  ledger_.record(stage_, p);
  if (options_.recordTrace) trace_.push_back({p, a, b, param});
}

Value Backend::enc(const PlainMatrix& plain) {
  const Shape shape = shapeOf(plain);
  record(Primitive::kEnc, shape);
  return make(shape, doEnc(plain, shape));
}

PlainMatrix Backend::dec(const Value& v, const DecryptionAuthority& authority,
                         std::string_view label) {
  check(v);
  if (!authorities_->valid(authority)) {
    throw AuthorityError("dec on " + name_ + ": missing or invalid decryption authority");
  }
  record(Primitive::kDec, v.shape());
  PlainMatrix out = doDec(v);
  disclosures_.push_back({authority.role(), stage_, std::string(label), v.shape(), flatten(out)});
  return out;
}

Value Backend::add(const Value& a, const Value& b) {
  checkSame(a, b, "Add");
  record(a.shape().isScalar() ? Primitive::kAdd : Primitive::kEAdd, a.shape(), b.shape());
  return make(a.shape(), doAdd(a, b));
}

Value Backend::sub(const Value& a, const Value& b) {
  checkSame(a, b, "Sub");
  record(a.shape().isScalar() ? Primitive::kSub : Primitive::kESub, a.shape(), b.shape());
  return make(a.shape(), doSub(a, b));
}

Value Backend::emul(const Value& a, const Value& b) {
  checkSame(a, b, "EMul");
  record(Primitive::kEMul, a.shape(), b.shape());
  return make(a.shape(), doEMul(a, b));
}

Value Backend::mul(const Value& a, const Value& b) {
  check(a);
  check(b);
  if (a.shape().cols != b.shape().rows) {
    throw ShapeMismatch("Mul: " + a.shape().str() + " x " + b.shape().str());
  }
  record(Primitive::kMul, a.shape(), b.shape());
  return make({a.shape().rows, b.shape().cols}, doMul(a, b));
}

Value Backend::dot(const Value& a, const Value& b) {
  checkSame(a, b, "DotProduct");
  if (!a.shape().isVector()) throw ShapeMismatch("DotProduct needs vectors, got " + a.shape().str());
  record(Primitive::kDotProduct, a.shape(), b.shape());
  return make(scalarShape(), doDot(a, b));
}

Value Backend::eq(const Value& a, const Value& b) {
  checkSame(a, b, "EEq");
  require(caps_.nativeEq, "native equality");
  record(Primitive::kEq, a.shape(), b.shape());
  return make(a.shape(), doEq(a, b));
}

Value Backend::greater(const Value& a, const Value& b) {
  checkSame(a, b, "Compare");
  record(Primitive::kCompare, a.shape(), b.shape());
  return make(a.shape(), doGreater(a, b));
}

Value Backend::gather(Primitive p, const GatherPlan& plan, std::vector<const Value*> operands,
                      std::int64_t param) {
  for (const Value* v : operands) check(*v);
  record(p, operands[0]->shape(), operands.size() > 1 ? operands[1]->shape() : Shape{}, param);
  return make(plan.out, doGather(plan, operands));
}

Value Backend::rotate(const Value& v, Index by, ShiftDirection dir) {
  check(v);
  require(caps_.rotation, "rotation");
  if (!v.shape().isVector()) throw ShapeMismatch("rotation needs a vector");
  const Primitive p = dir == ShiftDirection::kLeft ? Primitive::kLShift : Primitive::kRShift;
  return gather(p, layout::rotate(v.shape().rows, by, dir), {&v}, by);
}

Value Backend::shift(const Value& v, Index by, ShiftDirection dir, std::int64_t fill) {
  check(v);
  require(caps_.rotation, "rotation");
  if (!v.shape().isVector()) throw ShapeMismatch("shift needs a vector");
  const Primitive p = dir == ShiftDirection::kLeft ? Primitive::kLShift : Primitive::kRShift;
  return gather(p, layout::shift(v.shape().rows, by, dir, fill), {&v}, -by);
}

Value Backend::transpose(const Value& v) {
  check(v);
  return gather(Primitive::kTranspose, layout::transpose(v.shape()), {&v}, 0);
}

Value Backend::broadcast(const Value& scalar, Shape out) {
  check(scalar);
  if (!scalar.shape().isScalar()) throw ShapeMismatch("broadcast source must be a scalar");
  return gather(Primitive::kBroadcast, layout::broadcast(out), {&scalar}, out.size());
}

Value Backend::concat(const Value& a, const Value& b) {
  check(a);
  check(b);
  if (!a.shape().isVector() || !b.shape().isVector()) throw ShapeMismatch("concat needs vectors");
  return gather(Primitive::kConcat, layout::concat(a.shape().rows, b.shape().rows), {&a, &b}, 0);
}

Value Backend::slice(const Value& v, Index begin, Index length) {
  check(v);
  if (!v.shape().isVector()) throw ShapeMismatch("slice needs a vector");
  return gather(Primitive::kSlice, layout::slice(v.shape().rows, begin, length), {&v}, begin);
}

Value Backend::repeat(const Value& v, Index times) {
  check(v);
  require(caps_.repeatElements, "element repetition");
  if (!v.shape().isVector()) throw ShapeMismatch("repeat needs a vector");
  return gather(Primitive::kRepeat, layout::tile(v.shape().rows, times), {&v}, times);
}

Value Backend::repeatElements(const Value& v, Index times) {
  check(v);
  require(caps_.repeatElements, "element repetition");
  if (!v.shape().isVector()) throw ShapeMismatch("repeatElements needs a vector");
  return gather(Primitive::kRepeatElements, layout::repeatEach(v.shape().rows, times), {&v}, times);
}

Value Backend::place(const Value& mat, Index row, Index col, const Value& scalar) {
  check(mat);
  check(scalar);
  if (!scalar.shape().isScalar()) throw ShapeMismatch("place needs a scalar");
  return gather(Primitive::kPlace, layout::place(mat.shape(), row, col), {&mat, &scalar},
                row + col * mat.shape().rows);
}

Index Backend::size(const Value& v) {
  check(v);
  record(Primitive::kSize, v.shape());
  return v.shape().size();
}

Value Backend::sort(const Value& v) {
  check(v);
  require(caps_.sort, "oblivious sort");
  if (!v.shape().isVector()) throw ShapeMismatch("sort needs a vector");
  record(Primitive::kSort, v.shape());
  return make(v.shape(), doSort(v));
}

Value Backend::joinCount(const Value& a, const Value& b) {
  check(a);
  check(b);
  require(caps_.join, "oblivious join");
  record(Primitive::kJoin, a.shape(), b.shape());
  return make(scalarShape(), doJoinCount(a, b));
}

bool Backend::branch(const Value& v, std::string_view site) {
  check(v);
  return doBranch(v, site);
}

std::optional<PlainMatrix> Backend::inspect(const Value& v) {
  check(v);
  return doInspect(v);
}

void Backend::resetAccounting() {
  ledger_.clear();
  trace_.clear();
  disclosures_.clear();
}

std::unique_ptr<Backend> Backend::clone() const {
  auto child = doClone();
  if (!child) return nullptr;
  child->joinFamily(*this);
  if (helper_) {
    auto rng = std::make_shared<std::mt19937_64>((*helper_->randomness)());
    child->helper_ = ReciprocalHelper{rng, helper_->helper};
  }
  return child;
}

Value Backend::adopt(const Value& v) {
  check(v);
  return make(v.shape(), v.cells_);
}

void Backend::absorb(const Backend& clone) {
  ledger_.merge(clone.ledger_);
  disclosures_.insert(disclosures_.end(), clone.disclosures_.begin(), clone.disclosures_.end());
}

}  // namespace amppere

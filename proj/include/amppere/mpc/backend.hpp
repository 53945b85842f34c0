#pragma once

#include "amppere/machine/backend.hpp"
#include "amppere/mpc/runtime.hpp"

#include <memory>

namespace amppere::mpc {

/// Machine context whose private values are additively shared among three
/// party actors. Multiplications use dealer-made Beaver triples (one round);
/// equality and comparison are dealer gates (one round); sort is an
/// odd-even transposition network built from those. Data movement is local.
class MpcBackend final : public Backend {
 public:
  MpcBackend(Capabilities caps, BackendOptions options, LatencyModel latency = {});

  /// nativeEq, rotation, repeatElements and sort; no join, no division.
  static Capabilities defaultCapabilities();

  const RoundStats& roundStats() const { return rt_->stats(); }
  void resetRoundStats() { rt_->resetStats(); }
  const Runtime& runtime() const { return *rt_; }

 protected:
  CellsPtr doEnc(const PlainMatrix& plain, Shape shape) override;
  PlainMatrix doDec(const Value& v) override;
  CellsPtr doAdd(const Value& a, const Value& b) override;
  CellsPtr doSub(const Value& a, const Value& b) override;
  CellsPtr doEMul(const Value& a, const Value& b) override;
  CellsPtr doMul(const Value& a, const Value& b) override;
  CellsPtr doDot(const Value& a, const Value& b) override;
  CellsPtr doEq(const Value& a, const Value& b) override;
  CellsPtr doGreater(const Value& a, const Value& b) override;
  CellsPtr doGather(const GatherPlan& plan, const std::vector<const Value*>& operands) override;
  CellsPtr doSort(const Value& v) override;
  CellsPtr doJoinCount(const Value& a, const Value& b) override;
  bool doBranch(const Value& v, std::string_view site) override;
  std::optional<PlainMatrix> doInspect(const Value& v) override;

 private:
  struct SharedCells;
  using Ref = std::shared_ptr<const SharedCells>;

  enum class Gate { kEqual, kGreater };

  Ref ref(const Value& v) const;
  Ref fresh(Shape shape);
  void sync();

  Ref input(const Component& x, Shape shape);
  Component output(const Ref& v);
  Ref addLocal(const Ref& a, const Ref& b, bool subtract, const std::string& op);
  Ref gather(const GatherPlan& plan, const std::vector<Ref>& operands, const std::string& op);
  Ref beaverElementwise(const Ref& x, const Ref& y, const std::string& op);
  Ref beaverProduct(const Ref& x, const Ref& y, bool transposeLhs, const std::string& op);
  Ref gate(Gate kind, const Ref& x, const Ref& y, const std::string& op);
  Ref sortNetwork(const Ref& v);

  std::shared_ptr<Runtime> rt_;
};

}  // namespace amppere::mpc

#pragma once

#include "amppere/machine/backend.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <type_traits>

namespace amppere {

/// In-process backend over dense Eigen cells.
///
/// `Scalar` is the storage type: `std::uint64_t` realizes the exact domain
/// (two's complement, wrapping), `double` the approximate one. With
/// `oblivious == false` the backend is the cleartext oracle and allows
/// host-level branching and inspection; with `oblivious == true` it is the
/// oblivious simulator, whose cells are tainted: any attempt to branch on them
/// raises TaintViolation, so only dec() can make content public.
template <typename Scalar>
class PlainBackend final : public Backend {
  static_assert(std::is_same_v<Scalar, std::uint64_t> || std::is_same_v<Scalar, double>);

 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  static constexpr Domain kDomain =
      std::is_same_v<Scalar, double> ? Domain::kApprox : Domain::kExact;

  PlainBackend(std::string name, Capabilities caps, BackendOptions options, bool oblivious);

  bool oblivious() const { return oblivious_; }

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
  std::unique_ptr<Backend> doClone() const override;

 private:
  struct DenseCells final : Cells {
    explicit DenseCells(Matrix m) : m(std::move(m)) {}
    Matrix m;
  };

  static const Matrix& cells(const Value& v);
  static CellsPtr wrap(Matrix m);
  PlainMatrix toPlain(const Matrix& m) const;

  bool oblivious_;
};

extern template class PlainBackend<std::uint64_t>;
extern template class PlainBackend<double>;

using ExactPlainBackend = PlainBackend<std::uint64_t>;
using ApproxPlainBackend = PlainBackend<double>;

}  // namespace amppere

#include "amppere/backends/plain.hpp"

#include "amppere/machine/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace amppere {
namespace {

// Signed view of exact-domain storage.
inline std::int64_t asSigned(std::uint64_t x) { return std::bit_cast<std::int64_t>(x); }
inline std::uint64_t asRing(std::int64_t x) { return std::bit_cast<std::uint64_t>(x); }

template <typename Scalar>
Scalar fromFill(std::int64_t fill) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return static_cast<double>(fill);
  } else {
    return asRing(fill);
  }
}

template <typename Scalar>
bool lessThan(Scalar a, Scalar b) {
  if constexpr (std::is_same_v<Scalar, double>) {
    return a < b;
  } else {
    return asSigned(a) < asSigned(b);
  }
}

}  // namespace

template <typename Scalar>
PlainBackend<Scalar>::PlainBackend(std::string name, Capabilities caps, BackendOptions options,
                                   bool oblivious)
    : Backend(std::move(name), [&] {
        caps.domain = kDomain;
        return caps;
      }(), options),
      oblivious_(oblivious) {}

template <typename Scalar>
const typename PlainBackend<Scalar>::Matrix& PlainBackend<Scalar>::cells(const Value& v) {
  return static_cast<const DenseCells&>(cellsOf(v)).m;
}

template <typename Scalar>
typename PlainBackend<Scalar>::CellsPtr PlainBackend<Scalar>::wrap(Matrix m) {
  return std::make_shared<const DenseCells>(std::move(m));
}

template <typename Scalar>
PlainMatrix PlainBackend<Scalar>::toPlain(const Matrix& m) const {
  if constexpr (kDomain == Domain::kApprox) {
    return RealMatrix(m);
  } else {
    return IntMatrix(m.unaryExpr([](std::uint64_t x) { return asSigned(x); }));
  }
}

template <typename Scalar>
typename PlainBackend<Scalar>::CellsPtr PlainBackend<Scalar>::doEnc(const PlainMatrix& plain,
                                                                    Shape shape) {
  Matrix m(shape.rows, shape.cols);
  if (const auto* ints = std::get_if<IntMatrix>(&plain)) {
    if constexpr (kDomain == Domain::kApprox) {
      m = ints->template cast<double>();
    } else {
      m = ints->unaryExpr([](std::int64_t x) { return asRing(x); });
    }
  } else {
    const auto& reals = std::get<RealMatrix>(plain);
    if constexpr (kDomain == Domain::kApprox) {
      m = reals;
    } else {
      for (Index i = 0; i < reals.size(); ++i) {
        const double x = reals.data()[i];
        if (x != std::floor(x)) throw DomainError("non-integer value encrypted on exact backend");
        m.data()[i] = asRing(static_cast<std::int64_t>(x));
      }
    }
  }
  return wrap(std::move(m));
}

template <typename Scalar>
PlainMatrix PlainBackend<Scalar>::doDec(const Value& v) {
  return toPlain(cells(v));
}

template <typename Scalar>
typename PlainBackend<Scalar>::CellsPtr PlainBackend<Scalar>::doAdd(const Value& a, const Value& b) {
  return wrap(cells(a) + cells(b));
}

template <typename Scalar>
typename PlainBackend<Scalar>::CellsPtr PlainBackend<Scalar>::doSub(const Value& a, const Value& b) {
  return wrap(cells(a) - cells(b));
}

template <typename Scalar>
typename PlainBackend<Scalar>::CellsPtr PlainBackend<Scalar>::doEMul(const Value& a, const Value& b) {
  return wrap(cells(a).cwiseProduct(cells(b)));
}

template <typename Scalar>
typename PlainBackend<Scalar>::CellsPtr PlainBackend<Scalar>::doMul(const Value& a, const Value& b) {
  return wrap(cells(a) * cells(b));
}

template <typename Scalar>
typename PlainBackend<Scalar>::CellsPtr PlainBackend<Scalar>::doDot(const Value& a, const Value& b) {
  Matrix out(1, 1);
  out(0, 0) = cells(a).cwiseProduct(cells(b)).sum();
  return wrap(std::move(out));
}

template <typename Scalar>
typename PlainBackend<Scalar>::CellsPtr PlainBackend<Scalar>::doEq(const Value& a, const Value& b) {
  return wrap((cells(a).array() == cells(b).array()).matrix().template cast<Scalar>());
}

template <typename Scalar>
typename PlainBackend<Scalar>::CellsPtr PlainBackend<Scalar>::doGreater(const Value& a,
                                                                        const Value& b) {
  const Matrix& x = cells(a);
  const Matrix& y = cells(b);
  Matrix out(x.rows(), x.cols());
  for (Index i = 0; i < x.size(); ++i) {
    out.data()[i] = lessThan(y.data()[i], x.data()[i]) ? Scalar(1) : Scalar(0);
  }
  return wrap(std::move(out));
}

template <typename Scalar>
typename PlainBackend<Scalar>::CellsPtr PlainBackend<Scalar>::doGather(
    const GatherPlan& plan, const std::vector<const Value*>& operands) {
  Matrix out(plan.out.rows, plan.out.cols);
  const Scalar fill = fromFill<Scalar>(plan.fill);
  for (std::size_t i = 0; i < plan.sources.size(); ++i) {
    const auto& src = plan.sources[i];
    out.data()[i] = src.operand == GatherPlan::kFill
                        ? fill
                        : cells(*operands[static_cast<std::size_t>(src.operand)]).data()[src.linear];
  }
  return wrap(std::move(out));
}

template <typename Scalar>
typename PlainBackend<Scalar>::CellsPtr PlainBackend<Scalar>::doSort(const Value& v) {
  Matrix out = cells(v);
  std::sort(out.data(), out.data() + out.size(), lessThan<Scalar>);
  return wrap(std::move(out));
}

template <typename Scalar>
typename PlainBackend<Scalar>::CellsPtr PlainBackend<Scalar>::doJoinCount(const Value& a,
                                                                          const Value& b) {
  const Matrix& x = cells(a);
  const Matrix& y = cells(b);
  Scalar n = 0;
  for (Index i = 0; i < x.size(); ++i) {
    for (Index j = 0; j < y.size(); ++j) {
      if (x.data()[i] == y.data()[j]) n += 1;
    }
  }
  Matrix out(1, 1);
  out(0, 0) = n;
  return wrap(std::move(out));
}

template <typename Scalar>
bool PlainBackend<Scalar>::doBranch(const Value& v, std::string_view site) {
  if (oblivious_) throw TaintViolation("branch on private value", std::string(site));
  if (!v.shape().isScalar()) throw ShapeMismatch("branch needs a scalar condition");
  return cells(v)(0, 0) != Scalar(0);
}

template <typename Scalar>
std::optional<PlainMatrix> PlainBackend<Scalar>::doInspect(const Value& v) {
  if (oblivious_) return std::nullopt;
  return toPlain(cells(v));
}

template <typename Scalar>
std::unique_ptr<Backend> PlainBackend<Scalar>::doClone() const {
  return std::make_unique<PlainBackend<Scalar>>(name(), capabilities(), options(), oblivious_);
}

template class PlainBackend<std::uint64_t>;
template class PlainBackend<double>;

}  // namespace amppere

#include "amppere/machine/ops.hpp"

#include "amppere/machine/errors.hpp"

#include <cmath>

namespace amppere {
namespace {

Shape shapeOf(const PlainMatrix& m) {
  return std::visit([](const auto& mat) { return Shape{mat.rows(), mat.cols()}; }, m);
}

template <typename T>
T fromPlain(const Value& v, const DecryptionAuthority& auth, std::string_view label) {
  return T(decode<typename T::Scalar>(v, auth, label));
}

}  // namespace

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> decode(const Value& v,
                                                             const DecryptionAuthority& auth,
                                                             std::string_view label) {
  PlainMatrix plain = v.context().dec(v, auth, label);
  const Shape shape = shapeOf(plain);
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(shape.rows, shape.cols);
  std::visit(
      [&](const auto& mat) {
        using Source = typename std::decay_t<decltype(mat)>::Scalar;
        for (Index i = 0; i < mat.size(); ++i) {
          if constexpr (std::is_integral_v<Scalar> && std::is_floating_point_v<Source>) {
            out.data()[i] = static_cast<Scalar>(std::llround(mat.data()[i]));
          } else {
            out.data()[i] = static_cast<Scalar>(mat.data()[i]);
          }
        }
      },
      plain);
  return out;
}

template IntMatrix decode<std::int64_t>(const Value&, const DecryptionAuthority&, std::string_view);
template RealMatrix decode<double>(const Value&, const DecryptionAuthority&, std::string_view);

// --- Enc / Dec ---------------------------------------------------------------

PrivateScalar encScalar(Backend& ctx, std::int64_t x) {
  return PrivateScalar(ctx.enc(IntMatrix(IntMatrix::Constant(1, 1, x))));
}

PrivateScalar encScalar(Backend& ctx, double x) {
  return PrivateScalar(ctx.enc(RealMatrix(RealMatrix::Constant(1, 1, x))));
}

PrivateVector encVector(Backend& ctx, const IntVector& v) { return PrivateVector(ctx.enc(IntMatrix(v))); }

PrivateVector encVector(Backend& ctx, const RealVector& v) { return PrivateVector(ctx.enc(RealMatrix(v))); }

PrivateVector encVector(Backend& ctx, std::span<const std::int64_t> v) {
  IntVector m(static_cast<Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Index>(i)) = v[i];
  return encVector(ctx, m);
}

PrivateMatrix encMatrix(Backend& ctx, const IntMatrix& m) { return PrivateMatrix(ctx.enc(m)); }

PrivateMatrix encMatrix(Backend& ctx, const RealMatrix& m) { return PrivateMatrix(ctx.enc(m)); }

PrivateVector encFilled(Backend& ctx, Index n, std::int64_t x) {
  return encVector(ctx, IntVector(IntVector::Constant(n, x)));
}

PrivateMatrix encFilled(Backend& ctx, Shape shape, std::int64_t x) {
  return encMatrix(ctx, IntMatrix(IntMatrix::Constant(shape.rows, shape.cols, x)));
}

std::int64_t decInt(const PrivateScalar& s, const DecryptionAuthority& auth) {
  return decode<std::int64_t>(s.value(), auth)(0, 0);
}

double decReal(const PrivateScalar& s, const DecryptionAuthority& auth) {
  return decode<double>(s.value(), auth)(0, 0);
}

IntVector decInt(const PrivateVector& v, const DecryptionAuthority& auth) {
  return fromPlain<IntVector>(v.value(), auth, "");
}

RealVector decReal(const PrivateVector& v, const DecryptionAuthority& auth) {
  return fromPlain<RealVector>(v.value(), auth, "");
}

IntMatrix decInt(const PrivateMatrix& m, const DecryptionAuthority& auth) {
  return decode<std::int64_t>(m.value(), auth);
}

RealMatrix decReal(const PrivateMatrix& m, const DecryptionAuthority& auth) {
  return decode<double>(m.value(), auth);
}

// --- Primitive operators ---------------------------------------------------

PrivateScalar operator+(const PrivateScalar& a, const PrivateScalar& b) {
  return PrivateScalar(a.context().add(a.value(), b.value()));
}

PrivateScalar operator-(const PrivateScalar& a, const PrivateScalar& b) {
  return PrivateScalar(a.context().sub(a.value(), b.value()));
}

PrivateScalar operator*(const PrivateScalar& a, const PrivateScalar& b) {
  return PrivateScalar(a.context().emul(a.value(), b.value()));
}

PrivateVector eadd(const PrivateVector& a, const PrivateVector& b) {
  return PrivateVector(a.context().add(a.value(), b.value()));
}

PrivateVector esub(const PrivateVector& a, const PrivateVector& b) {
  return PrivateVector(a.context().sub(a.value(), b.value()));
}

PrivateVector emul(const PrivateVector& a, const PrivateVector& b) {
  return PrivateVector(a.context().emul(a.value(), b.value()));
}

PrivateMatrix eadd(const PrivateMatrix& a, const PrivateMatrix& b) {
  return PrivateMatrix(a.context().add(a.value(), b.value()));
}

PrivateMatrix esub(const PrivateMatrix& a, const PrivateMatrix& b) {
  return PrivateMatrix(a.context().sub(a.value(), b.value()));
}

PrivateMatrix emul(const PrivateMatrix& a, const PrivateMatrix& b) {
  return PrivateMatrix(a.context().emul(a.value(), b.value()));
}

PrivateMatrix mul(const PrivateMatrix& a, const PrivateMatrix& b) {
  return PrivateMatrix(a.context().mul(a.value(), b.value()));
}

PrivateScalar dot(const PrivateVector& a, const PrivateVector& b) {
  return PrivateScalar(a.context().dot(a.value(), b.value()));
}

PrivateVector lshift(const PrivateVector& v, Index by, ShiftMode mode, std::int64_t fill) {
  Backend& ctx = v.context();
  return PrivateVector(mode == ShiftMode::kCyclic
                           ? ctx.rotate(v.value(), by, ShiftDirection::kLeft)
                           : ctx.shift(v.value(), by, ShiftDirection::kLeft, fill));
}

PrivateVector rshift(const PrivateVector& v, Index by, ShiftMode mode, std::int64_t fill) {
  Backend& ctx = v.context();
  return PrivateVector(mode == ShiftMode::kCyclic
                           ? ctx.rotate(v.value(), by, ShiftDirection::kRight)
                           : ctx.shift(v.value(), by, ShiftDirection::kRight, fill));
}

Index size(const PrivateVector& v) { return v.context().size(v.value()); }

Shape size(const PrivateMatrix& m) {
  m.context().size(m.value());
  return m.shape();
}

PrivateMatrix transpose(const PrivateMatrix& m) { return PrivateMatrix(m.context().transpose(m.value())); }

PrivateMatrix asMatrix(const PrivateVector& v) { return PrivateMatrix(v.value()); }

PrivateVector asVector(const PrivateMatrix& m) { return PrivateVector(m.value()); }

PrivateVector broadcast(const PrivateScalar& s, Index n) {
  return PrivateVector(s.context().broadcast(s.value(), vectorShape(n)));
}

PrivateMatrix broadcast(const PrivateScalar& s, Shape shape) {
  return PrivateMatrix(s.context().broadcast(s.value(), shape));
}

PrivateVector concat(const PrivateVector& a, const PrivateVector& b) {
  return PrivateVector(a.context().concat(a.value(), b.value()));
}

PrivateVector slice(const PrivateVector& v, Index begin, Index length) {
  return PrivateVector(v.context().slice(v.value(), begin, length));
}

PrivateScalar at(const PrivateVector& v, Index i) {
  return PrivateScalar(v.context().slice(v.value(), i, 1));
}

PrivateVector repeat(const PrivateVector& v, Index times) {
  return PrivateVector(v.context().repeat(v.value(), times));
}

PrivateVector repeatElements(const PrivateVector& v, Index times) {
  return PrivateVector(v.context().repeatElements(v.value(), times));
}

PrivateVector sort(const PrivateVector& v) { return PrivateVector(v.context().sort(v.value())); }

PrivateBool greater(const PrivateScalar& a, const PrivateScalar& b) {
  return PrivateBool(a.context().greater(a.value(), b.value()));
}

PrivateMatrix place(const PrivateMatrix& m, Index row, Index col, const PrivateScalar& s) {
  return PrivateMatrix(m.context().place(m.value(), row, col, s.value()));
}

// --- Equality, reciprocal ---------------------------------------------------

PrivateVector eeq(const PrivateVector& seq, const PrivateVector& idx) {
  Backend& ctx = seq.context();
  const Capabilities& caps = ctx.capabilities();
  if (caps.nativeEq) return PrivateVector(ctx.eq(seq.value(), idx.value()));

  if (!caps.division) {
    throw CapabilityUnsupported("EEq needs an equality gate or division on backend " + ctx.name());
  }
  if (ctx.domain() != Domain::kApprox) {
    throw DomainError("arithmetic EEq produces fractions; backend " + ctx.name() +
                      " is exact-integer");
  }
  if (seq.size() != idx.size()) throw ShapeMismatch("EEq operands differ in length");
  if (!ctx.reciprocalHelper()) throw PreconditionViolation("EEq: no randomness source for division");

  const Index n = seq.size();
  const PrivateVector d = seq - idx;
  const PrivateVector offset = encVector(ctx, RealVector(RealVector::Constant(n, ctx.options().xi)));
  const PrivateVector inv = maskedReciprocal(d + offset, *ctx.reciprocalHelper());
  const PrivateVector ones = encVector(ctx, RealVector(RealVector::Ones(n)));
  return ones - emul(d, inv);
}

PrivateVector maskedReciprocal(const PrivateVector& n, const ReciprocalHelper& parties) {
  Backend& ctx = n.context();
  if (ctx.domain() != Domain::kApprox) {
    throw DomainError("reciprocal needs the approximate domain; backend " + ctx.name() +
                      " is exact-integer");
  }
  if (!parties.randomness) throw PreconditionViolation("masked reciprocal: no randomness source");

  // Owner side: fresh non-zero masks with random sign.
  std::uniform_real_distribution<double> magnitude(1.0, 2.0);
  std::bernoulli_distribution negative(0.5);
  RealVector r(n.size());
  for (Index i = 0; i < r.size(); ++i) {
    r(i) = magnitude(*parties.randomness) * (negative(*parties.randomness) ? -1.0 : 1.0);
  }
  const PrivateVector mask = encVector(ctx, r);

  // Helper side: sees r*n only.
  const RealVector masked = decReal(PrivateVector(ctx.emul(n.value(), mask.value())), parties.helper);
  RealVector inverse(masked.size());
  for (Index i = 0; i < masked.size(); ++i) {
    if (masked(i) == 0.0) throw DomainError("masked reciprocal: division by zero");
    inverse(i) = 1.0 / masked(i);
  }
  return emul(encVector(ctx, inverse), mask);
}

PrivateScalar maskedReciprocal(const PrivateScalar& n, const ReciprocalHelper& parties) {
  return at(maskedReciprocal(PrivateVector(n.value()), parties), 0);
}

// --- Ternary operators -----------------------------------------------------

PrivateScalar choose(const PrivateBool& cond, const PrivateScalar& n1, const PrivateScalar& n2) {
  return cond * (n1 - n2) + n2;
}

PrivateVector chooseVec(const PrivateVector& cond, const PrivateVector& v1, const PrivateVector& v2) {
  return eadd(emul(cond, esub(v1, v2)), v2);
}

PrivateVector chooseVecExt(const PrivateBool& cond, const PrivateVector& v1, const PrivateVector& v2) {
  return chooseVec(broadcast(cond, v1.size()), v1, v2);
}

PrivateMatrix chooseMat(const PrivateMatrix& cond, const PrivateMatrix& m1, const PrivateMatrix& m2) {
  return eadd(emul(cond, esub(m1, m2)), m2);
}

PrivateMatrix chooseMatExt(const PrivateBool& cond, const PrivateMatrix& m1, const PrivateMatrix& m2) {
  return chooseMat(broadcast(cond, m1.shape()), m1, m2);
}

// --- Private matrix manipulation -------------------------------------------

PrivateVector maskGen(Index size, const PrivateScalar& idx) {
  Backend& ctx = idx.context();
  IntVector seq(size);
  for (Index i = 0; i < size; ++i) seq(i) = i;
  return eeq(encVector(ctx, seq), broadcast(idx, size));
}

PrivateScalar vectorLookup(const PrivateVector& vec, const PrivateScalar& idx) {
  return innerProduct(vec, maskGen(vec.size(), idx));
}

PrivateVector vectorUpdate(const PrivateVector& vec, const PrivateScalar& idx, const PrivateScalar& val) {
  const PrivateVector spread = broadcast(val, vec.size());
  return chooseVec(maskGen(vec.size(), idx), spread, vec);
}

PrivateScalar matrixLookup(const PrivateMatrix& mat, const PrivateScalar& row, const PrivateScalar& col) {
  const PrivateMatrix rowMask = transpose(asMatrix(maskGen(mat.rows(), row)));
  const PrivateMatrix rowVec = mul(rowMask, mat);
  return vectorLookup(asVector(transpose(rowVec)), col);
}

PrivateMatrix matrixUpdate(const PrivateMatrix& mat, const PrivateScalar& row, const PrivateScalar& col,
                           const PrivateScalar& val) {
  const PrivateMatrix spread = broadcast(val, mat.shape());
  const PrivateMatrix rowMask = asMatrix(maskGen(mat.rows(), row));
  const PrivateMatrix colMask = transpose(asMatrix(maskGen(mat.cols(), col)));
  return chooseMat(mul(rowMask, colMask), spread, mat);
}

}  // namespace amppere

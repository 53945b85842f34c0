#pragma once

// The abstract machine's operator set: primitive operators as free functions
// over private handles, the ternary (choose) family, and private matrix
// manipulation built from masks.

#include "amppere/machine/backend.hpp"
#include "amppere/machine/types.hpp"

#include <cstdint>
#include <limits>
#include <span>

namespace amppere {

/// Public sentinel for padding and fill shifts; outside every token and
/// packed-container value, which are ASCII-derived and stay below 0x7f7f...
inline constexpr std::int64_t kSentinel = std::numeric_limits<std::int64_t>::max();

enum class ShiftMode : std::uint8_t { kCyclic, kFill };

// --- Enc / Dec -------------------------------------------------------------

PrivateScalar encScalar(Backend& ctx, std::int64_t x);
PrivateScalar encScalar(Backend& ctx, double x);
PrivateVector encVector(Backend& ctx, const IntVector& v);
PrivateVector encVector(Backend& ctx, const RealVector& v);
PrivateVector encVector(Backend& ctx, std::span<const std::int64_t> v);
PrivateMatrix encMatrix(Backend& ctx, const IntMatrix& m);
PrivateMatrix encMatrix(Backend& ctx, const RealMatrix& m);

/// All-`x` private values of the given shape.
PrivateVector encFilled(Backend& ctx, Index n, std::int64_t x);
PrivateMatrix encFilled(Backend& ctx, Shape shape, std::int64_t x);

/// Decrypts into the requested scalar type. Exact values convert to double
/// losslessly up to 2^53; approximate values round to the nearest integer
/// when an integer type is requested.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> decode(const Value& v,
                                                             const DecryptionAuthority& auth,
                                                             std::string_view label = "");

std::int64_t decInt(const PrivateScalar& s, const DecryptionAuthority& auth);
double decReal(const PrivateScalar& s, const DecryptionAuthority& auth);
IntVector decInt(const PrivateVector& v, const DecryptionAuthority& auth);
RealVector decReal(const PrivateVector& v, const DecryptionAuthority& auth);
IntMatrix decInt(const PrivateMatrix& m, const DecryptionAuthority& auth);
RealMatrix decReal(const PrivateMatrix& m, const DecryptionAuthority& auth);

// --- Primitive operators ---------------------------------------------------

PrivateScalar operator+(const PrivateScalar& a, const PrivateScalar& b);
PrivateScalar operator-(const PrivateScalar& a, const PrivateScalar& b);
PrivateScalar operator*(const PrivateScalar& a, const PrivateScalar& b);

PrivateVector eadd(const PrivateVector& a, const PrivateVector& b);
PrivateVector esub(const PrivateVector& a, const PrivateVector& b);
PrivateVector emul(const PrivateVector& a, const PrivateVector& b);
inline PrivateVector operator+(const PrivateVector& a, const PrivateVector& b) { return eadd(a, b); }
inline PrivateVector operator-(const PrivateVector& a, const PrivateVector& b) { return esub(a, b); }

PrivateMatrix eadd(const PrivateMatrix& a, const PrivateMatrix& b);
PrivateMatrix esub(const PrivateMatrix& a, const PrivateMatrix& b);
PrivateMatrix emul(const PrivateMatrix& a, const PrivateMatrix& b);
inline PrivateMatrix operator+(const PrivateMatrix& a, const PrivateMatrix& b) { return eadd(a, b); }
inline PrivateMatrix operator-(const PrivateMatrix& a, const PrivateMatrix& b) { return esub(a, b); }

/// Matrix product.
PrivateMatrix mul(const PrivateMatrix& a, const PrivateMatrix& b);

/// DotProduct; the matrix-manipulation routines call it InnerProduct.
PrivateScalar dot(const PrivateVector& a, const PrivateVector& b);
inline PrivateScalar innerProduct(const PrivateVector& a, const PrivateVector& b) { return dot(a, b); }

/// Rotation by default; kFill shifts in `fill` instead.
PrivateVector lshift(const PrivateVector& v, Index by, ShiftMode mode = ShiftMode::kCyclic,
                     std::int64_t fill = kSentinel);
PrivateVector rshift(const PrivateVector& v, Index by, ShiftMode mode = ShiftMode::kCyclic,
                     std::int64_t fill = kSentinel);

Index size(const PrivateVector& v);
Shape size(const PrivateMatrix& m);
PrivateMatrix transpose(const PrivateMatrix& m);

/// Column vector <-> n x 1 matrix views (no primitive involved).
PrivateMatrix asMatrix(const PrivateVector& v);
PrivateVector asVector(const PrivateMatrix& m);

PrivateVector broadcast(const PrivateScalar& s, Index n);
PrivateMatrix broadcast(const PrivateScalar& s, Shape shape);
PrivateVector concat(const PrivateVector& a, const PrivateVector& b);
PrivateVector slice(const PrivateVector& v, Index begin, Index length);
PrivateScalar at(const PrivateVector& v, Index i);
PrivateVector repeat(const PrivateVector& v, Index times);
PrivateVector repeatElements(const PrivateVector& v, Index times);
PrivateVector sort(const PrivateVector& v);
PrivateBool greater(const PrivateScalar& a, const PrivateScalar& b);

/// Writes a private scalar at a public position.
PrivateMatrix place(const PrivateMatrix& m, Index row, Index col, const PrivateScalar& s);

// --- Equality, reciprocal ---------------------------------------------------

/// Element-wise equality bits. Uses the backend's equality gate when it has
/// one; otherwise the arithmetic form (d * -1/(d + xi) + 1) with d = seq - idx,
/// which needs the masked-reciprocal division route and integer-valued
/// inputs. Outputs of the arithmetic form are within 2*xi of {0,1}.
PrivateVector eeq(const PrivateVector& seq, const PrivateVector& idx);

/// 1/n per slot without a division gate: the owner multiplies by a random
/// private mask r, the helper decrypts r*n, inverts it in clear, re-encrypts,
/// and the product with r leaves 1/n. The helper sees only r*n.
PrivateVector maskedReciprocal(const PrivateVector& n, const ReciprocalHelper& parties);
PrivateScalar maskedReciprocal(const PrivateScalar& n, const ReciprocalHelper& parties);

// --- Ternary operators -----------------------------------------------------

/// cond * (n1 - n2) + n2, with no branch on cond.
PrivateScalar choose(const PrivateBool& cond, const PrivateScalar& n1, const PrivateScalar& n2);
PrivateVector chooseVec(const PrivateVector& cond, const PrivateVector& v1, const PrivateVector& v2);
PrivateVector chooseVecExt(const PrivateBool& cond, const PrivateVector& v1, const PrivateVector& v2);
PrivateMatrix chooseMat(const PrivateMatrix& cond, const PrivateMatrix& m1, const PrivateMatrix& m2);
PrivateMatrix chooseMatExt(const PrivateBool& cond, const PrivateMatrix& m1, const PrivateMatrix& m2);

// --- Private matrix manipulation -------------------------------------------

/// One-hot private vector with a 1 at the private position idx.
PrivateVector maskGen(Index size, const PrivateScalar& idx);
PrivateScalar vectorLookup(const PrivateVector& vec, const PrivateScalar& idx);
PrivateVector vectorUpdate(const PrivateVector& vec, const PrivateScalar& idx, const PrivateScalar& val);
PrivateScalar matrixLookup(const PrivateMatrix& mat, const PrivateScalar& row, const PrivateScalar& col);
PrivateMatrix matrixUpdate(const PrivateMatrix& mat, const PrivateScalar& row, const PrivateScalar& col,
                           const PrivateScalar& val);

}  // namespace amppere

#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

namespace amppere {

using Index = Eigen::Index;

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// A public value crossing the enc/dec boundary. Exact backends hand back
/// IntMatrix, approximate backends RealMatrix.
using PlainMatrix = std::variant<IntMatrix, RealMatrix>;

/// Numeric domain of a backend's private values.
enum class Domain : std::uint8_t {
  kExact,   // 64-bit two's complement, wrapping
  kApprox,  // approximate fixed-point, carried as double
};

const char* domainName(Domain d);

struct Shape {
  Index rows = 0;
  Index cols = 0;

  Index size() const { return rows * cols; }
  bool isVector() const { return cols == 1; }
  bool isScalar() const { return rows == 1 && cols == 1; }
  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

inline Shape scalarShape() { return {1, 1}; }
inline Shape vectorShape(Index n) { return {n, 1}; }

/// Opaque storage owned by a backend. Handles never expose it.
class Cells {
 public:
  virtual ~Cells() = default;
};

class Backend;

/// Untyped handle to a backend-held value. The owning context must outlive
/// every handle it produced.
class Value {
 public:
  Value() = default;

  Backend& context() const;
  bool valid() const { return owner_ != nullptr; }
  std::uint64_t family() const { return family_; }
  const Shape& shape() const { return shape_; }
  Domain domain() const { return domain_; }

 private:
  friend class Backend;

  Value(Backend* owner, std::uint64_t family, Shape shape, Domain domain,
        std::shared_ptr<const Cells> cells)
      : owner_(owner),
        family_(family),
        shape_(shape),
        domain_(domain),
        cells_(std::move(cells)) {}

  Backend* owner_ = nullptr;
  std::uint64_t family_ = 0;
  Shape shape_;
  Domain domain_ = Domain::kExact;
  std::shared_ptr<const Cells> cells_;
};

class PrivateScalar {
 public:
  PrivateScalar() = default;
  explicit PrivateScalar(Value v);

  const Value& value() const { return v_; }
  Backend& context() const { return v_.context(); }
  Domain domain() const { return v_.domain(); }

 private:
  Value v_;
};

/// Private value constrained to 0/1 semantics. Represented numerically since
/// the ternary and mask operators consume it arithmetically.
using PrivateBool = PrivateScalar;

/// Column vector of private slots; the length is public.
class PrivateVector {
 public:
  PrivateVector() = default;
  explicit PrivateVector(Value v);

  const Value& value() const { return v_; }
  Backend& context() const { return v_.context(); }
  Domain domain() const { return v_.domain(); }
  Index size() const { return v_.shape().rows; }

 private:
  Value v_;
};

class PrivateMatrix {
 public:
  PrivateMatrix() = default;
  explicit PrivateMatrix(Value v);

  const Value& value() const { return v_; }
  Backend& context() const { return v_.context(); }
  Domain domain() const { return v_.domain(); }
  Index rows() const { return v_.shape().rows; }
  Index cols() const { return v_.shape().cols; }
  Shape shape() const { return v_.shape(); }

 private:
  Value v_;
};

enum class Role : std::uint8_t { kP1, kP2, kP3 };

const char* roleName(Role r);

/// Token naming which party role may decrypt on one context family.
class DecryptionAuthority {
 public:
  DecryptionAuthority() = default;

  Role role() const { return role_; }
  std::uint64_t family() const { return family_; }
  std::uint64_t token() const { return token_; }

 private:
  friend class AuthorityRegistry;

  DecryptionAuthority(std::uint64_t family, std::uint64_t token, Role role)
      : family_(family), token_(token), role_(role) {}

  std::uint64_t family_ = 0;
  std::uint64_t token_ = 0;
  Role role_ = Role::kP1;
};

}  // namespace amppere

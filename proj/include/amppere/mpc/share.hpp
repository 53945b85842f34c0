#pragma once

// Three-party additive secret sharing over 64-bit wrapping integers, with
// dealer-assisted multiplication and equality. These are the scalar
// reference forms; the actor runtime runs the same steps per party.

#include "amppere/machine/backend.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace amppere::mpc {

using Word = std::uint64_t;
inline constexpr int kParties = 3;

/// One component per party; the components sum to the secret mod 2^64.
struct Share {
  std::array<Word, kParties> part{};

  friend bool operator==(const Share&, const Share&) = default;
};

/// Rounds, messages and bytes of one scope.
struct CommCounts {
  std::uint64_t rounds = 0;
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;

  CommCounts& operator+=(const CommCounts& o) {
    rounds += o.rounds;
    messages += o.messages;
    bytes += o.bytes;
    return *this;
  }
  friend bool operator==(const CommCounts&, const CommCounts&) = default;
};

/// Communication accounting. `online` excludes dealer preprocessing, which
/// is tallied in `offline`.
struct RoundStats {
  CommCounts online;
  CommCounts offline;
  std::map<std::string, CommCounts> byStage;
  std::map<std::string, CommCounts> byOperation;

  void addRound(const std::string& op, const std::string& stage);
  void addMessage(const std::string& op, const std::string& stage, std::uint64_t bytes,
                  bool preprocessing);

  /// `scope,name,rounds,messages,bytes` rows (online only per scope).
  std::string csv() const;

  friend bool operator==(const RoundStats&, const RoundStats&) = default;
};

/// A value that was opened to a party during a protocol run.
struct OpenedValue {
  int party = 0;
  std::string tag;
  Word value = 0;
};

/// Scalar protocol bookkeeping: communication counts and every opened value.
struct ProtocolLog {
  RoundStats stats;
  std::vector<OpenedValue> opened;
};

/// Shares of a, b and c = a*b. Consumable once.
class BeaverTriple {
 public:
  BeaverTriple(Share a, Share b, Share c) : a_(a), b_(b), c_(c) {}

  const Share& a() const { return a_; }
  const Share& b() const { return b_; }
  const Share& c() const { return c_; }
  bool consumed() const { return consumed_; }

  /// Marks the triple used; throws ProtocolError on a second use.
  void consume();

 private:
  Share a_, b_, c_;
  bool consumed_ = false;
};

/// Trusted dealer: generates correlated randomness and serves the equality
/// and comparison gates as ideal functionalities.
class Dealer {
 public:
  explicit Dealer(std::uint64_t seed) : rng_(seed) {}

  BeaverTriple triple();
  Share fresh(Word x) { return split(x); }
  Share split(Word x);
  Word random() { return rng_(); }

 private:
  std::mt19937_64 rng_;
};

Share shareSecret(Word x, std::mt19937_64& rng);

/// Joint opening; needs a live authority from `registry`.
Word reconstruct(const Share& s, const DecryptionAuthority& authority,
                 const AuthorityRegistry& registry);

Share localAdd(const Share& a, const Share& b);
Share localSub(const Share& a, const Share& b);

/// Multiplies public constant into a share (local).
Share localScale(const Share& a, Word k);

/// One exchange round: each party opens d_i = x_i - a_i and e_i = y_i - b_i.
Share beaverMul(const Share& x, const Share& y, BeaverTriple& triple, ProtocolLog& log);

/// Shares of [x == y]. Parties send x_i - y_i + r_i to the dealer, who knows
/// r, tests the difference for zero and returns fresh shares of the bit.
Share dealerEqualityGate(const Share& x, const Share& y, Dealer& dealer, ProtocolLog& log);

/// Shares of [x > y] under the signed reading, served the same way.
Share dealerGreaterGate(const Share& x, const Share& y, Dealer& dealer, ProtocolLog& log);

}  // namespace amppere::mpc

#include "amppere/mpc/share.hpp"

#include "amppere/machine/errors.hpp"

#include <bit>
#include <sstream>

namespace amppere::mpc {
namespace {

constexpr std::uint64_t kWordBytes = sizeof(Word);

Word sum(const Share& s) { return s.part[0] + s.part[1] + s.part[2]; }

// Every party sends `words` values to each of the other two.
void recordBroadcast(ProtocolLog& log, const std::string& op, std::uint64_t words) {
  for (int i = 0; i < kParties * (kParties - 1); ++i) {
    log.stats.addMessage(op, "default", words * kWordBytes, false);
  }
}

// Parties send `words` values to the dealer and receive one share back.
void recordDealerRound(ProtocolLog& log, const std::string& op, std::uint64_t words) {
  for (int i = 0; i < kParties; ++i) {
    log.stats.addMessage(op, "default", words * kWordBytes, false);
    log.stats.addMessage(op, "default", kWordBytes, false);
  }
  log.stats.addRound(op, "default");
}

}  // namespace

void RoundStats::addRound(const std::string& op, const std::string& stage) {
  ++online.rounds;
  ++byStage[stage].rounds;
  ++byOperation[op].rounds;
}

void RoundStats::addMessage(const std::string& op, const std::string& stage, std::uint64_t bytes,
                            bool preprocessing) {
  CommCounts& total = preprocessing ? offline : online;
  ++total.messages;
  total.bytes += bytes;
  if (preprocessing) return;
  auto& s = byStage[stage];
  ++s.messages;
  s.bytes += bytes;
  auto& o = byOperation[op];
  ++o.messages;
  o.bytes += bytes;
}

std::string RoundStats::csv() const {
  std::ostringstream out;
  out << "scope,name,rounds,messages,bytes\n";
  out << "total,online," << online.rounds << ',' << online.messages << ',' << online.bytes << '\n';
  out << "total,offline," << offline.rounds << ',' << offline.messages << ',' << offline.bytes
      << '\n';
  for (const auto& [name, c] : byStage) {
    out << "stage," << name << ',' << c.rounds << ',' << c.messages << ',' << c.bytes << '\n';
  }
  for (const auto& [name, c] : byOperation) {
    out << "operation," << name << ',' << c.rounds << ',' << c.messages << ',' << c.bytes << '\n';
  }
  return out.str();
}

void BeaverTriple::consume() {
  if (consumed_) throw ProtocolError("Beaver triple reused");
  consumed_ = true;
}

Share Dealer::split(Word x) {
  Share s;
  s.part[0] = rng_();
  s.part[1] = rng_();
  s.part[2] = x - s.part[0] - s.part[1];
  return s;
}

BeaverTriple Dealer::triple() {
  const Word a = rng_();
  const Word b = rng_();
  return BeaverTriple(split(a), split(b), split(a * b));
}

Share shareSecret(Word x, std::mt19937_64& rng) {
  Share s;
  s.part[0] = rng();
  s.part[1] = rng();
  s.part[2] = x - s.part[0] - s.part[1];
  return s;
}

Word reconstruct(const Share& s, const DecryptionAuthority& authority,
                 const AuthorityRegistry& registry) {
  if (!registry.valid(authority)) throw AuthorityError("reconstruct without a valid authority");
  return sum(s);
}

Share localAdd(const Share& a, const Share& b) {
  Share out;
  for (int i = 0; i < kParties; ++i) out.part[i] = a.part[i] + b.part[i];
  return out;
}

Share localSub(const Share& a, const Share& b) {
  Share out;
  for (int i = 0; i < kParties; ++i) out.part[i] = a.part[i] - b.part[i];
  return out;
}

Share localScale(const Share& a, Word k) {
  Share out;
  for (int i = 0; i < kParties; ++i) out.part[i] = a.part[i] * k;
  return out;
}

Share beaverMul(const Share& x, const Share& y, BeaverTriple& triple, ProtocolLog& log) {
  triple.consume();
  const Share dShare = localSub(x, triple.a());
  const Share eShare = localSub(y, triple.b());
  recordBroadcast(log, "Mul", 2);
  log.stats.addRound("Mul", "default");
  const Word d = sum(dShare);
  const Word e = sum(eShare);
  for (int i = 0; i < kParties; ++i) {
    log.opened.push_back({i, "d", d});
    log.opened.push_back({i, "e", e});
  }
  Share z;
  for (int i = 0; i < kParties; ++i) {
    z.part[i] = triple.c().part[i] + d * triple.b().part[i] + e * triple.a().part[i];
  }
  z.part[0] += d * e;
  return z;
}

Share dealerEqualityGate(const Share& x, const Share& y, Dealer& dealer, ProtocolLog& log) {
  const Word mask = dealer.random();
  const Share maskShare = dealer.split(mask);
  const Word masked = sum(localAdd(localSub(x, y), maskShare));
  recordDealerRound(log, "EEq", 1);
  return dealer.fresh(masked - mask == 0 ? 1 : 0);
}

Share dealerGreaterGate(const Share& x, const Share& y, Dealer& dealer, ProtocolLog& log) {
  const Word rx = dealer.random();
  const Word ry = dealer.random();
  const Word mx = sum(localAdd(x, dealer.split(rx)));
  const Word my = sum(localAdd(y, dealer.split(ry)));
  recordDealerRound(log, "Compare", 2);
  const auto sx = std::bit_cast<std::int64_t>(mx - rx);
  const auto sy = std::bit_cast<std::int64_t>(my - ry);
  return dealer.fresh(sx > sy ? 1 : 0);
}

}  // namespace amppere::mpc

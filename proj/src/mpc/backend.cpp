#include "amppere/mpc/backend.hpp"

#include "amppere/machine/errors.hpp"

#include <bit>
#include <cmath>

namespace amppere::mpc {

struct MpcBackend::SharedCells final : Cells {
  SharedCells(std::shared_ptr<Runtime> rt, Handle h, Shape shape)
      : rt(std::move(rt)), handle(h), shape(shape) {}
  ~SharedCells() override { rt->release(handle); }

  std::shared_ptr<Runtime> rt;
  Handle handle;
  Shape shape;
};

namespace {

Component sumOfOpenings(const Component& own, const Message& m1, const Message& m2, int slot) {
  return own + m1.payload[static_cast<std::size_t>(slot)] + m2.payload[static_cast<std::size_t>(slot)];
}

// The two peers of party `i`, in a fixed order.
std::array<int, 2> peers(int i) { return {(i + 1) % kParties, (i + 2) % kParties}; }

Component ringOf(const PlainMatrix& plain, Shape shape) {
  Component x(shape.rows, shape.cols);
  if (const auto* ints = std::get_if<IntMatrix>(&plain)) {
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = std::bit_cast<Word>(ints->data()[i]);
  } else {
    const auto& reals = std::get<RealMatrix>(plain);
    for (Index i = 0; i < x.size(); ++i) {
      const double v = reals.data()[i];
      if (v != std::floor(v)) throw DomainError("non-integer value shared on the exact ring");
      x.data()[i] = std::bit_cast<Word>(static_cast<std::int64_t>(v));
    }
  }
  return x;
}

}  // namespace

MpcBackend::MpcBackend(Capabilities caps, BackendOptions options, LatencyModel latency)
    : Backend("mpc", [&] {
        caps.domain = Domain::kExact;
        caps.join = false;
        caps.division = false;
        return caps;
      }(), options),
      rt_(std::make_shared<Runtime>(latency, options.seed)) {}

Capabilities MpcBackend::defaultCapabilities() {
  Capabilities caps;
  caps.nativeEq = true;
  caps.rotation = true;
  caps.repeatElements = true;
  caps.sort = true;
  caps.domain = Domain::kExact;
  return caps;
}

MpcBackend::Ref MpcBackend::ref(const Value& v) const {
  // Cells are owned by the value; alias the shared pointer for the protocol.
  const auto& cells = static_cast<const SharedCells&>(cellsOf(v));
  return Ref(std::shared_ptr<const SharedCells>{}, &cells);
}

MpcBackend::Ref MpcBackend::fresh(Shape shape) {
  return std::make_shared<const SharedCells>(rt_, rt_->newHandle(), shape);
}

void MpcBackend::sync() { rt_->setStage(stage()); }

// --- Input / output ----------------------------------------------------------

MpcBackend::Ref MpcBackend::input(const Component& x, Shape shape) {
  Ref out = fresh(shape);
  auto parts = rt_->hostSplit(x);
  for (int i = 0; i < kParties; ++i) rt_->hostSend(i, Message{"input", false, {parts[i]}});
  const Handle h = out->handle;
  rt_->execute("Enc", [h](PartyNode& p) { p.put(h, p.receive(kHost, "input").payload.at(0)); });
  rt_->addRound("Enc");
  return out;
}

Component MpcBackend::output(const Ref& v) {
  const Handle h = v->handle;
  rt_->execute("Dec", [h](PartyNode& p) { p.send(kHost, Message{"output", false, {p.at(h)}}); });
  Component x = Component::Zero(v->shape.rows, v->shape.cols);
  for (int i = 0; i < kParties; ++i) x += rt_->hostReceive(i, "output").payload.at(0);
  rt_->addRound("Dec");
  return x;
}

// --- Local steps -------------------------------------------------------------

MpcBackend::Ref MpcBackend::addLocal(const Ref& a, const Ref& b, bool subtract,
                                     const std::string& op) {
  Ref out = fresh(a->shape);
  const Handle ha = a->handle, hb = b->handle, ho = out->handle;
  rt_->execute(op, [=](PartyNode& p) {
    p.put(ho, subtract ? Component(p.at(ha) - p.at(hb)) : Component(p.at(ha) + p.at(hb)));
  });
  return out;
}

MpcBackend::Ref MpcBackend::gather(const GatherPlan& plan, const std::vector<Ref>& operands,
                                   const std::string& op) {
  Ref out = fresh(plan.out);
  std::vector<Handle> handles;
  for (const auto& r : operands) handles.push_back(r->handle);
  const Handle ho = out->handle;
  const Word fill = std::bit_cast<Word>(plan.fill);
  rt_->execute(op, [&plan, &handles, ho, fill](PartyNode& p) {
    std::vector<const Component*> src;
    for (Handle h : handles) src.push_back(&p.at(h));
    Component c(plan.out.rows, plan.out.cols);
    for (std::size_t i = 0; i < plan.sources.size(); ++i) {
      const auto& s = plan.sources[i];
      // A public constant is carried by the leader's component alone.
      c.data()[i] = s.operand == GatherPlan::kFill
                        ? (p.leader() ? fill : Word{0})
                        : src[static_cast<std::size_t>(s.operand)]->data()[s.linear];
    }
    p.put(ho, std::move(c));
  });
  return out;
}

// --- Multiplication ----------------------------------------------------------

MpcBackend::Ref MpcBackend::beaverElementwise(const Ref& x, const Ref& y, const std::string& op) {
  const Shape shape = x->shape;
  Ref out = fresh(shape);
  const Handle hx = x->handle, hy = y->handle, ho = out->handle;

  auto dealer = [shape](DealerNode& d) {
    const Component a = d.random(shape.rows, shape.cols);
    const Component b = d.random(shape.rows, shape.cols);
    const Component c = a.cwiseProduct(b);
    auto as = d.split(a), bs = d.split(b), cs = d.split(c);
    for (int i = 0; i < kParties; ++i) d.send(i, Message{"triple", true, {as[i], bs[i], cs[i]}});
  };
  auto party = [=](PartyNode& p) {
    const Message t = p.receive(kDealer, "triple");
    const Component& a = t.payload[0];
    const Component& b = t.payload[1];
    const Component& c = t.payload[2];
    const Component dOwn = p.at(hx) - a;
    const Component eOwn = p.at(hy) - b;
    const auto others = peers(p.id());
    for (int j : others) p.send(j, Message{"open", false, {dOwn, eOwn}});
    const Message m1 = p.receive(others[0], "open");
    const Message m2 = p.receive(others[1], "open");
    const Component d = sumOfOpenings(dOwn, m1, m2, 0);
    const Component e = sumOfOpenings(eOwn, m1, m2, 1);
    Component z = c + d.cwiseProduct(b) + e.cwiseProduct(a);
    if (p.leader()) z += d.cwiseProduct(e);
    p.put(ho, std::move(z));
  };
  rt_->execute(op, party, dealer);
  rt_->addRound(op);
  return out;
}

MpcBackend::Ref MpcBackend::beaverProduct(const Ref& x, const Ref& y, bool transposeLhs,
                                          const std::string& op) {
  const Index m = transposeLhs ? x->shape.cols : x->shape.rows;
  const Index k = transposeLhs ? x->shape.rows : x->shape.cols;
  const Index n = y->shape.cols;
  Ref out = fresh({m, n});
  const Handle hx = x->handle, hy = y->handle, ho = out->handle;

  auto dealer = [m, k, n](DealerNode& d) {
    const Component a = d.random(m, k);
    const Component b = d.random(k, n);
    const Component c = a * b;
    auto as = d.split(a), bs = d.split(b), cs = d.split(c);
    for (int i = 0; i < kParties; ++i) d.send(i, Message{"triple", true, {as[i], bs[i], cs[i]}});
  };
  auto party = [=](PartyNode& p) {
    const Message t = p.receive(kDealer, "triple");
    const Component& a = t.payload[0];
    const Component& b = t.payload[1];
    const Component& c = t.payload[2];
    const Component xi = transposeLhs ? Component(p.at(hx).transpose()) : p.at(hx);
    const Component dOwn = xi - a;
    const Component eOwn = p.at(hy) - b;
    const auto others = peers(p.id());
    for (int j : others) p.send(j, Message{"open", false, {dOwn, eOwn}});
    const Message m1 = p.receive(others[0], "open");
    const Message m2 = p.receive(others[1], "open");
    const Component d = sumOfOpenings(dOwn, m1, m2, 0);
    const Component e = sumOfOpenings(eOwn, m1, m2, 1);
    Component z = c + d * b + a * e;
    if (p.leader()) z += d * e;
    p.put(ho, std::move(z));
  };
  rt_->execute(op, party, dealer);
  rt_->addRound(op);
  return out;
}

// --- Dealer gates --------------------------------------------------------------

MpcBackend::Ref MpcBackend::gate(Gate kind, const Ref& x, const Ref& y, const std::string& op) {
  const Shape shape = x->shape;
  Ref out = fresh(shape);
  const Handle hx = x->handle, hy = y->handle, ho = out->handle;

  auto dealer = [shape, kind](DealerNode& d) {
    const Component r = d.random(shape.rows, shape.cols);
    const Component s = d.random(shape.rows, shape.cols);
    auto rs = d.split(r), ss = d.split(s);
    for (int i = 0; i < kParties; ++i) d.send(i, Message{"mask", true, {rs[i], ss[i]}});
    Component u = Component::Zero(shape.rows, shape.cols);
    Component w = Component::Zero(shape.rows, shape.cols);
    for (int i = 0; i < kParties; ++i) {
      const Message m = d.receive(i, "masked");
      u += m.payload[0];
      if (kind == Gate::kGreater) w += m.payload[1];
    }
    Component bit(shape.rows, shape.cols);
    for (Index j = 0; j < bit.size(); ++j) {
      if (kind == Gate::kEqual) {
        bit.data()[j] = u.data()[j] - r.data()[j] == 0 ? 1 : 0;
      } else {
        const auto lhs = std::bit_cast<std::int64_t>(Word(u.data()[j] - r.data()[j]));
        const auto rhs = std::bit_cast<std::int64_t>(Word(w.data()[j] - s.data()[j]));
        bit.data()[j] = lhs > rhs ? 1 : 0;
      }
    }
    auto bits = d.split(bit);
    for (int i = 0; i < kParties; ++i) d.send(i, Message{"bit", false, {bits[i]}});
  };
  auto party = [=](PartyNode& p) {
    const Message mask = p.receive(kDealer, "mask");
    if (kind == Gate::kEqual) {
      p.send(kDealer, Message{"masked", false, {Component(p.at(hx) - p.at(hy) + mask.payload[0])}});
    } else {
      p.send(kDealer, Message{"masked", false,
                              {Component(p.at(hx) + mask.payload[0]),
                               Component(p.at(hy) + mask.payload[1])}});
    }
    p.put(ho, p.receive(kDealer, "bit").payload.at(0));
  };
  rt_->execute(op, party, dealer);
  rt_->addRound(op);
  return out;
}

// --- Sort ----------------------------------------------------------------------

MpcBackend::Ref MpcBackend::sortNetwork(const Ref& v) {
  const Index n = v->shape.size();
  const std::string op(primitiveName(Primitive::kSort));
  Ref cur = v;
  for (Index phase = 0; phase < n; ++phase) {
    std::vector<Index> lefts;
    for (Index i = phase % 2; i + 1 < n; i += 2) lefts.push_back(i);
    if (lefts.empty()) continue;
    const auto pairs = static_cast<Index>(lefts.size());

    GatherPlan pickL{.out = {pairs, 1}}, pickR{.out = {pairs, 1}};
    for (Index i : lefts) {
      pickL.sources.push_back({0, i});
      pickR.sources.push_back({0, i + 1});
    }
    const Ref lhs = gather(pickL, {cur}, op);
    const Ref rhs = gather(pickR, {cur}, op);
    // swap = [lhs > rhs]; lhs' = lhs + swap*(rhs - lhs), rhs' = rhs - swap*(rhs - lhs)
    const Ref swap = gate(Gate::kGreater, lhs, rhs, op);
    const Ref delta = beaverElementwise(swap, addLocal(rhs, lhs, true, op), op);
    const Ref newL = addLocal(lhs, delta, false, op);
    const Ref newR = addLocal(rhs, delta, true, op);

    GatherPlan merge{.out = v->shape};
    for (Index i = 0; i < n; ++i) merge.sources.push_back({0, i});
    for (Index k = 0; k < pairs; ++k) {
      merge.sources[static_cast<std::size_t>(lefts[k])] = {1, k};
      merge.sources[static_cast<std::size_t>(lefts[k] + 1)] = {2, k};
    }
    cur = gather(merge, {cur, newL, newR}, op);
  }
  if (cur == v) cur = gather(GatherPlan{.out = v->shape, .sources = [&] {
                               std::vector<GatherPlan::Source> s;
                               for (Index i = 0; i < n; ++i) s.push_back({0, i});
                               return s;
                             }()},
                             {cur}, op);
  return cur;
}

// --- Hooks ---------------------------------------------------------------------

Backend::CellsPtr MpcBackend::doEnc(const PlainMatrix& plain, Shape shape) {
  sync();
  return input(ringOf(plain, shape), shape);
}

PlainMatrix MpcBackend::doDec(const Value& v) {
  sync();
  const Component x = output(ref(v));
  IntMatrix out(x.rows(), x.cols());
  for (Index i = 0; i < x.size(); ++i) out.data()[i] = std::bit_cast<std::int64_t>(x.data()[i]);
  return out;
}

Backend::CellsPtr MpcBackend::doAdd(const Value& a, const Value& b) {
  sync();
  return addLocal(ref(a), ref(b), false, "Add");
}

Backend::CellsPtr MpcBackend::doSub(const Value& a, const Value& b) {
  sync();
  return addLocal(ref(a), ref(b), true, "Sub");
}

Backend::CellsPtr MpcBackend::doEMul(const Value& a, const Value& b) {
  sync();
  return beaverElementwise(ref(a), ref(b), std::string(primitiveName(Primitive::kEMul)));
}

Backend::CellsPtr MpcBackend::doMul(const Value& a, const Value& b) {
  sync();
  return beaverProduct(ref(a), ref(b), false, std::string(primitiveName(Primitive::kMul)));
}

Backend::CellsPtr MpcBackend::doDot(const Value& a, const Value& b) {
  sync();
  return beaverProduct(ref(a), ref(b), true, std::string(primitiveName(Primitive::kDotProduct)));
}

Backend::CellsPtr MpcBackend::doEq(const Value& a, const Value& b) {
  sync();
  return gate(Gate::kEqual, ref(a), ref(b), std::string(primitiveName(Primitive::kEq)));
}

Backend::CellsPtr MpcBackend::doGreater(const Value& a, const Value& b) {
  sync();
  return gate(Gate::kGreater, ref(a), ref(b), std::string(primitiveName(Primitive::kCompare)));
}

Backend::CellsPtr MpcBackend::doGather(const GatherPlan& plan,
                                       const std::vector<const Value*>& operands) {
  sync();
  std::vector<Ref> refs;
  for (const Value* v : operands) refs.push_back(ref(*v));
  return gather(plan, refs, "Gather");
}

Backend::CellsPtr MpcBackend::doSort(const Value& v) {
  sync();
  return sortNetwork(ref(v));
}

Backend::CellsPtr MpcBackend::doJoinCount(const Value&, const Value&) {
  throw CapabilityUnsupported("join gate is not available on the mpc backend");
}

bool MpcBackend::doBranch(const Value&, std::string_view site) {
  throw TaintViolation("branch on shared value", std::string(site));
}

std::optional<PlainMatrix> MpcBackend::doInspect(const Value&) { return std::nullopt; }

}  // namespace amppere::mpc

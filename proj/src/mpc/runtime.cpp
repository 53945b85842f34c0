#include "amppere/mpc/runtime.hpp"

#include "amppere/machine/errors.hpp"

#include <latch>

namespace amppere::mpc {

std::string endpointName(int endpoint) {
  switch (endpoint) {
    case 0: return "P1";
    case 1: return "P2";
    case 2: return "P3";
    case kDealer: return "dealer";
    case kHost: return "host";
    default: return "endpoint" + std::to_string(endpoint);
  }
}

std::uint64_t Message::bytes() const {
  std::uint64_t n = 0;
  for (const auto& c : payload) n += static_cast<std::uint64_t>(c.size()) * sizeof(Word);
  return n;
}

// ---------------------------------------------------------------------------
// Endpoints

Endpoint::Endpoint(Runtime& rt, int id, std::uint64_t seed)
    : rt_(rt), id_(id), rng_(seed), jitterRng_(rt.latency().seed + static_cast<std::uint64_t>(id)) {}

void Endpoint::send(int to, Message msg) {
  if (to == id_) throw ProtocolError("endpoint sending to itself");
  auto at = std::chrono::steady_clock::now() + rt_.latency_.fixed;
  if (rt_.latency_.jitter.count() > 0) {
    std::uniform_int_distribution<std::int64_t> jitter(0, rt_.latency_.jitter.count());
    at += std::chrono::microseconds(jitter(jitterRng_));
  }
  rt_.account(msg);
  rt_.deliver(id_, to, Runtime::Envelope{at, std::move(msg)});
}

Message Endpoint::receive(int from, const std::string& tag) {
  Runtime::Envelope env = rt_.take(from, id_);
  if (env.msg.tag != tag) {
    throw ProtocolError(endpointName(id_) + " expected '" + tag + "' from " + endpointName(from) +
                        ", got '" + env.msg.tag + "'");
  }
  std::this_thread::sleep_until(env.deliverAt);
  if (auto* party = dynamic_cast<PartyNode*>(this)) party->note(from, env.msg);
  return std::move(env.msg);
}

Component Endpoint::random(Index rows, Index cols) {
  Component c(rows, cols);
  for (Index i = 0; i < c.size(); ++i) c.data()[i] = rng_();
  return c;
}

const Component& PartyNode::at(Handle h) const {
  auto it = store_.find(h);
  if (it == store_.end()) throw ProtocolError(endpointName(id_) + " has no component " + std::to_string(h));
  return it->second;
}

void PartyNode::note(int from, const Message& msg) {
  TranscriptEntry e{from, msg.tag, {}};
  for (const auto& c : msg.payload) e.values.insert(e.values.end(), c.data(), c.data() + c.size());
  transcript_.push_back(std::move(e));
}

std::array<Component, kParties> DealerNode::split(const Component& x) {
  std::array<Component, kParties> out{random(x.rows(), x.cols()), random(x.rows(), x.cols()), {}};
  out[2] = x - out[0] - out[1];
  return out;
}

// ---------------------------------------------------------------------------
// Runtime

Runtime::Runtime(LatencyModel latency, std::uint64_t seed)
    : latency_(latency), channels_(kEndpoints * kEndpoints), host_(*this, kHost, seed ^ 0x9e3779b97f4a7c15ULL) {
  std::seed_seq seq{seed, seed >> 32};
  std::array<std::uint64_t, kParties + 1> seeds{};
  {
    std::vector<std::uint32_t> raw(seeds.size() * 2);
    seq.generate(raw.begin(), raw.end());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      seeds[i] = (static_cast<std::uint64_t>(raw[2 * i]) << 32) | raw[2 * i + 1];
    }
  }
  for (int i = 0; i < kParties; ++i) parties_.push_back(std::make_unique<PartyNode>(*this, i, seeds[i]));
  dealer_ = std::make_unique<DealerNode>(*this, kDealer, seeds[kParties]);
  for (auto& actor : actors_) {
    actor.thread = std::thread([this, &actor] { runActor(actor); });
  }
}

Runtime::~Runtime() {
  closeAll();
  for (auto& actor : actors_) {
    {
      std::lock_guard lock(actor.mu);
      actor.stopping = true;
    }
    actor.cv.notify_all();
  }
  for (auto& actor : actors_) {
    if (actor.thread.joinable()) actor.thread.join();
  }
}

void Runtime::runActor(Actor& actor) {
  for (;;) {
    std::function<void()> task;
    {
      std::unique_lock lock(actor.mu);
      actor.cv.wait(lock, [&] { return actor.stopping || !actor.tasks.empty(); });
      if (actor.tasks.empty()) return;
      task = std::move(actor.tasks.front());
      actor.tasks.pop_front();
    }
    task();
  }
}

void Runtime::post(Actor& actor, std::function<void()> task) {
  {
    std::lock_guard lock(actor.mu);
    actor.tasks.push_back(std::move(task));
  }
  actor.cv.notify_one();
}

void Runtime::deliver(int from, int to, Envelope env) {
  Channel& ch = channel(from, to);
  {
    std::lock_guard lock(ch.mu);
    ch.queue.push_back(std::move(env));
  }
  ch.cv.notify_one();
}

Runtime::Envelope Runtime::take(int from, int to) {
  Channel& ch = channel(from, to);
  std::unique_lock lock(ch.mu);
  ch.cv.wait(lock, [&] {
    if (!ch.queue.empty()) return true;
    std::lock_guard closeLock(closeMu_);
    return closed_;
  });
  if (ch.queue.empty()) {
    throw ProtocolError("channel " + endpointName(from) + "->" + endpointName(to) + " closed");
  }
  Envelope env = std::move(ch.queue.front());
  ch.queue.pop_front();
  return env;
}

void Runtime::closeAll() {
  {
    std::lock_guard lock(closeMu_);
    closed_ = true;
  }
  for (auto& ch : channels_) {
    // Taking the lock orders the flag store before any waiter's re-check.
    std::lock_guard lock(ch.mu);
    ch.cv.notify_all();
  }
}

void Runtime::account(const Message& msg) {
  std::lock_guard lock(statsMu_);
  stats_.addMessage(op_, stage_, msg.bytes(), msg.preprocessing);
}

void Runtime::execute(const std::string& op, const PartyStep& party, const DealerStep& dealer) {
  if (broken_) throw ProtocolError("runtime stopped after an earlier protocol failure");
  op_ = op;
  std::vector<Handle> released;
  {
    std::lock_guard lock(releaseMu_);
    released.swap(released_);
  }

  const int count = kParties + (dealer ? 1 : 0);
  std::latch done(count);
  std::mutex errorMu;
  std::exception_ptr error;
  auto guard = [&](const std::function<void()>& body) {
    try {
      body();
    } catch (...) {
      {
        std::lock_guard lock(errorMu);
        if (!error) error = std::current_exception();
      }
      closeAll();
    }
    done.count_down();
  };

  for (int i = 0; i < kParties; ++i) {
    post(actors_[i], [&, i] {
      guard([&] {
        PartyNode& node = *parties_[i];
        for (Handle h : released) node.drop(h);
        party(node);
      });
    });
  }
  if (dealer) {
    post(actors_[kParties], [&] { guard([&] { dealer(*dealer_); }); });
  }
  done.wait();
  if (error) {
    broken_ = true;
    std::rethrow_exception(error);
  }
}

void Runtime::hostSend(int to, Message msg) { host_.send(to, std::move(msg)); }

Message Runtime::hostReceive(int from, const std::string& tag) { return host_.receive(from, tag); }

std::array<Component, kParties> Runtime::hostSplit(const Component& x) {
  std::array<Component, kParties> out{host_.random(x.rows(), x.cols()),
                                      host_.random(x.rows(), x.cols()), {}};
  out[2] = x - out[0] - out[1];
  return out;
}

void Runtime::release(Handle h) {
  std::lock_guard lock(releaseMu_);
  released_.push_back(h);
}

}  // namespace amppere::mpc

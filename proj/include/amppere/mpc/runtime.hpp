#pragma once

// In-process network of party actors. Three parties and a dealer each run on
// their own thread; the host (the thread driving the program, acting for the
// data owners) is a fifth endpoint. All interaction goes through per
// directed-pair FIFO channels.

#include "amppere/mpc/share.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

namespace amppere::mpc {

using Component = Eigen::Matrix<Word, Eigen::Dynamic, Eigen::Dynamic>;
using Handle = std::uint64_t;

inline constexpr int kDealer = 3;
inline constexpr int kHost = 4;
inline constexpr int kEndpoints = 5;

std::string endpointName(int endpoint);

/// Per-message delay: fixed part plus uniform jitter.
struct LatencyModel {
  std::chrono::microseconds fixed{0};
  std::chrono::microseconds jitter{0};
  std::uint64_t seed = 7;
};

struct Message {
  std::string tag;
  bool preprocessing = false;
  std::vector<Component> payload;

  std::uint64_t bytes() const;
};

/// What a party saw: every message it received from another actor.
struct TranscriptEntry {
  int from = 0;
  std::string tag;
  std::vector<Word> values;
};

using Transcript = std::vector<TranscriptEntry>;

class Runtime;

/// Common endpoint behaviour for the actors.
class Endpoint {
 public:
  Endpoint(Runtime& rt, int id, std::uint64_t seed);
  virtual ~Endpoint() = default;

  Endpoint(const Endpoint&) = delete;
  Endpoint& operator=(const Endpoint&) = delete;

  int id() const { return id_; }
  std::mt19937_64& rng() { return rng_; }

  void send(int to, Message msg);
  Message receive(int from, const std::string& tag);

  Component random(Index rows, Index cols);

 protected:
  Runtime& rt_;
  int id_;
  std::mt19937_64 rng_;
  std::mt19937_64 jitterRng_;
};

/// A computing party: holds one component of every shared value.
class PartyNode : public Endpoint {
 public:
  using Endpoint::Endpoint;

  Role role() const { return static_cast<Role>(id_); }
  bool leader() const { return id_ == 0; }

  const Component& at(Handle h) const;
  void put(Handle h, Component c) { store_[h] = std::move(c); }
  void drop(Handle h) { store_.erase(h); }
  std::size_t storeSize() const { return store_.size(); }

  const Transcript& transcript() const { return transcript_; }
  void note(int from, const Message& msg);

 private:
  std::unordered_map<Handle, Component> store_;
  Transcript transcript_;
};

class DealerNode : public Endpoint {
 public:
  using Endpoint::Endpoint;

  /// Splits into three uniformly random components.
  std::array<Component, kParties> split(const Component& x);
};

/// Owns the actors and channels. Programs are driven from one host thread.
class Runtime {
 public:
  using PartyStep = std::function<void(PartyNode&)>;
  using DealerStep = std::function<void(DealerNode&)>;

  Runtime(LatencyModel latency, std::uint64_t seed);
  ~Runtime();

  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  /// Runs `party` on all three party actors and `dealer` (if any) on the
  /// dealer actor, concurrently, and waits for all of them. The first actor
  /// exception is rethrown; the runtime is unusable afterwards.
  void execute(const std::string& op, const PartyStep& party, const DealerStep& dealer = {});

  void hostSend(int to, Message msg);
  Message hostReceive(int from, const std::string& tag);
  std::mt19937_64& hostRng() { return host_.rng(); }

  /// Splits a host value into three components (the owner's randomness).
  std::array<Component, kParties> hostSplit(const Component& x);

  Handle newHandle() { return nextHandle_++; }

  /// Queues a handle for release on every party at the next execute().
  void release(Handle h);

  void setStage(std::string stage) { stage_ = std::move(stage); }
  void addRound(const std::string& op) { stats_.addRound(op, stage_); }
  const RoundStats& stats() const { return stats_; }
  void resetStats() { stats_ = RoundStats{}; }

  const Transcript& transcript(int party) const { return parties_[party]->transcript(); }
  std::size_t liveComponents(int party) const { return parties_[party]->storeSize(); }
  const LatencyModel& latency() const { return latency_; }

 private:
  friend class Endpoint;

  struct Envelope {
    std::chrono::steady_clock::time_point deliverAt;
    Message msg;
  };

  struct Channel {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<Envelope> queue;
  };

  struct Actor {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::function<void()>> tasks;
    bool stopping = false;
    std::thread thread;
  };

  Channel& channel(int from, int to) { return channels_[from * kEndpoints + to]; }
  void deliver(int from, int to, Envelope env);
  Envelope take(int from, int to);
  void account(const Message& msg);
  void closeAll();
  void runActor(Actor& actor);
  void post(Actor& actor, std::function<void()> task);

  LatencyModel latency_;
  std::vector<Channel> channels_;
  std::vector<std::unique_ptr<PartyNode>> parties_;
  std::unique_ptr<DealerNode> dealer_;
  Endpoint host_;
  std::array<Actor, kParties + 1> actors_;

  std::mutex closeMu_;
  bool closed_ = false;

  std::mutex statsMu_;
  RoundStats stats_;
  std::string stage_ = "default";
  std::string op_ = "idle";

  std::mutex releaseMu_;
  std::vector<Handle> released_;
  Handle nextHandle_ = 1;
  bool broken_ = false;
};

}  // namespace amppere::mpc

#pragma once

#include <array>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "trunclab/exec.hpp"
#include "trunclab/random.hpp"
#include "trunclab/ring.hpp"

namespace trunclab {

enum class PartyId : std::uint8_t { P0 = 0, P1 = 1, P2 = 2 };

inline unsigned idx(PartyId p) { return static_cast<unsigned>(p); }
inline PartyId party(unsigned i) { return static_cast<PartyId>(i % 3); }

enum class Tag : std::uint8_t {
  open_alpha = 1,
  beaver_open = 2,
  drelu_w = 3,
  drelu_resp = 4,
  relu_e = 5,
  triple_c = 6,
  trunc_pair = 7,
  rss_reshare = 8,
  rss_s0 = 9,
  drelu_bcast = 10,
  output_open = 11,
  rss_reshare_pre = 12,
  rss_open = 13,
};

// preprocessing traffic; excluded from online rounds
bool is_offline(Tag t);

struct Envelope {
  PartyId from = PartyId::P0;
  PartyId to = PartyId::P0;
  Tag tag = Tag::open_alpha;
  std::uint8_t width = 64;  // element width in bits
  std::vector<u64> elems;
};

// Wire frame: u32 BE length of what follows, u8 tag, u8 width, u16 BE count,
// then count little-endian elements of ceil(width/8) bytes. Messages with more
// than 65535 elements span several frames; the tag's top bit marks "more".
inline constexpr std::size_t kMaxFrameElems = 0xffff;
inline constexpr std::uint8_t kMoreFrames = 0x80;

std::size_t element_bytes(unsigned width);
std::size_t wire_bytes(std::size_t count, unsigned width);
std::vector<std::uint8_t> encode_frames(const Envelope& e);

// incremental decoder for one direction of a byte stream
class FrameDecoder {
 public:
  FrameDecoder(PartyId from, PartyId to) : from_(from), to_(to) {}
  // appends bytes; returns completed envelopes
  std::vector<Envelope> feed(std::span<const std::uint8_t> bytes);

 private:
  PartyId from_, to_;
  std::vector<std::uint8_t> buf_;
  Envelope partial_;
  bool in_progress_ = false;
};

class Mailbox {
 public:
  void push(Envelope e);
  Envelope pop(std::chrono::milliseconds timeout);
  void close();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Envelope> q_;
  bool closed_ = false;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual void send(Envelope e) = 0;
  virtual Envelope recv(PartyId to, PartyId from, std::chrono::milliseconds timeout) = 0;
  virtual void close() = 0;
  virtual std::string name() const = 0;
};

class InProcTransport : public Transport {
 public:
  void send(Envelope e) override;
  Envelope recv(PartyId to, PartyId from, std::chrono::milliseconds timeout) override;
  void close() override;
  std::string name() const override { return "inproc"; }

 private:
  std::array<Mailbox, 9> boxes_;
};

// loopback TCP, one connection per party pair, background readers per socket end
class TcpTransport : public Transport {
 public:
  explicit TcpTransport(std::uint16_t base_port = 0);
  ~TcpTransport() override;
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;

  void send(Envelope e) override;
  Envelope recv(PartyId to, PartyId from, std::chrono::milliseconds timeout) override;
  void close() override;
  std::string name() const override { return "tcp"; }

 private:
  void reader(int fd, PartyId from, PartyId to);
  std::array<int, 9> fd_{};  // fd_[from*3+to] is from's socket toward to
  std::array<std::mutex, 9> send_mu_;
  std::array<Mailbox, 9> boxes_;
  std::vector<std::thread> readers_;
  std::mutex close_mu_;
  bool closed_ = false;
};

std::unique_ptr<Transport> make_transport(const std::string& kind);

struct LinkStats {
  u64 messages = 0;
  u64 bytes = 0;
  u64 bits = 0;
};

class CommMeter {
 public:
  void record(const Envelope& e, unsigned flight);
  void push_flight(PartyId from, PartyId to, unsigned flight);
  unsigned pop_flight(PartyId from, PartyId to);
  void reset();

  LinkStats online(PartyId from, PartyId to) const;
  LinkStats offline(PartyId from, PartyId to) const;
  unsigned rounds() const;
  // logical bits a party sends online
  u64 bits_sent(PartyId from) const;
  u64 max_bits_sent() const;
  // CSV rows: phase,from,to,messages,bytes,bits
  std::string table_csv() const;

 private:
  mutable std::mutex mu_;
  std::array<LinkStats, 9> on_{}, off_{};
  std::array<std::deque<unsigned>, 9> flights_;
  unsigned rounds_ = 0;
};

class Party {
 public:
  Party(PartyId id, Transport& t, CommMeter& m, const SeedSet& s, Exec ex,
        std::chrono::milliseconds timeout)
      : id_(id), t_(t), meter_(m), seeds_(s), exec_(ex), timeout_(timeout) {}

  PartyId id() const { return id_; }
  unsigned index() const { return idx(id_); }
  Exec exec() const { return exec_; }

  void send(PartyId to, Tag tag, unsigned width, std::span<const u64> elems);
  std::vector<u64> recv(PartyId from, Tag tag);
  // only the seeds this party is entitled to
  const Seed& seed(SeedId id) const;
  bool holds(SeedId id) const;
  // fresh lane range; every party calls this in the same order
  u64 reserve_lanes(u64 n) {
    const u64 b = lanes_;
    lanes_ += n;
    return b;
  }

 private:
  PartyId id_;
  Transport& t_;
  CommMeter& meter_;
  const SeedSet& seeds_;
  Exec exec_;
  std::chrono::milliseconds timeout_;
  unsigned depth_ = 0;
  u64 lanes_ = 0;
};

struct RunOptions {
  Exec exec = Exec::parallel;
  std::chrono::milliseconds timeout{60000};
};

// runs fn once per party, each on its own thread
void run_parties(Transport& t, CommMeter& m, const SeedSet& seeds,
                 const std::function<void(Party&)>& fn, RunOptions opt = {});

struct LinkProfile {
  std::string name;
  double bandwidth_bps;
  double rtt_ms;
};

LinkProfile link_profile(const std::string& name);
// rounds * RTT + bits / bandwidth, in milliseconds
double simulate_latency(unsigned rounds, u64 bits, const LinkProfile& link);

}  // namespace trunclab

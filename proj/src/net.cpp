#include "trunclab/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <exception>
#include <sstream>

namespace trunclab {

bool is_offline(Tag t) {
  return t == Tag::triple_c || t == Tag::trunc_pair || t == Tag::rss_s0 ||
         t == Tag::rss_reshare_pre;
}

std::size_t element_bytes(unsigned width) { return (width + 7) / 8; }

std::size_t wire_bytes(std::size_t count, unsigned width) {
  const std::size_t frames = count == 0 ? 1 : (count + kMaxFrameElems - 1) / kMaxFrameElems;
  return frames * 8 + count * element_bytes(width);
}

std::vector<std::uint8_t> encode_frames(const Envelope& e) {
  if (e.width < 1 || e.width > 64) throw ParameterError("element width must be in [1, 64]");
  if ((static_cast<unsigned>(e.tag) & kMoreFrames) != 0) throw ParameterError("tag out of range");
  const std::size_t eb = element_bytes(e.width);
  std::vector<std::uint8_t> out;
  out.reserve(wire_bytes(e.elems.size(), e.width));
  std::size_t pos = 0;
  do {
    const std::size_t n = std::min(kMaxFrameElems, e.elems.size() - pos);
    const bool more = pos + n < e.elems.size();
    const auto len = static_cast<std::uint32_t>(4 + n * eb);
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(len >> s));
    out.push_back(static_cast<std::uint8_t>(static_cast<unsigned>(e.tag) | (more ? kMoreFrames : 0)));
    out.push_back(e.width);
    out.push_back(static_cast<std::uint8_t>(n >> 8));
    out.push_back(static_cast<std::uint8_t>(n));
    const u64 m = mask_bits(e.width);
    for (std::size_t i = 0; i < n; ++i) {
      const u64 v = e.elems[pos + i];
      if ((v & ~m) != 0) throw RangeError("element wider than declared width");
      for (std::size_t b = 0; b < eb; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
    }
    pos += n;
  } while (pos < e.elems.size());
  return out;
}

std::vector<Envelope> FrameDecoder::feed(std::span<const std::uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
  std::vector<Envelope> done;
  std::size_t off = 0;
  while (buf_.size() - off >= 4) {
    std::uint32_t len = 0;
    for (int i = 0; i < 4; ++i) len = (len << 8) | buf_[off + i];
    if (len < 4) throw ParseError("frame shorter than its header");
    if (buf_.size() - off < 4 + static_cast<std::size_t>(len)) break;
    const std::uint8_t* f = buf_.data() + off + 4;
    const std::uint8_t tagb = f[0];
    const unsigned width = f[1];
    const std::size_t n = (static_cast<std::size_t>(f[2]) << 8) | f[3];
    if (width < 1 || width > 64) throw ParseError("bad element width");
    const std::size_t eb = element_bytes(width);
    if (len != 4 + n * eb) throw ParseError("frame length disagrees with count");
    const Tag tag = static_cast<Tag>(tagb & ~kMoreFrames);
    if (!in_progress_) {
      partial_ = Envelope{from_, to_, tag, static_cast<std::uint8_t>(width), {}};
      in_progress_ = true;
    } else if (partial_.tag != tag || partial_.width != width) {
      throw ParseError("continuation frame does not match");
    }
    for (std::size_t i = 0; i < n; ++i) {
      u64 v = 0;
      for (std::size_t b = 0; b < eb; ++b) v |= static_cast<u64>(f[4 + i * eb + b]) << (8 * b);
      partial_.elems.push_back(v);
    }
    if ((tagb & kMoreFrames) == 0) {
      done.push_back(std::move(partial_));
      partial_ = Envelope{};
      in_progress_ = false;
    }
    off += 4 + len;
  }
  buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(off));
  return done;
}

void Mailbox::push(Envelope e) {
  {
    std::lock_guard<std::mutex> lk(mu_);
    if (closed_) throw TransportError("send on closed transport");
    q_.push_back(std::move(e));
  }
  cv_.notify_all();
}

Envelope Mailbox::pop(std::chrono::milliseconds timeout) {
  std::unique_lock<std::mutex> lk(mu_);
  if (!cv_.wait_for(lk, timeout, [&] { return !q_.empty() || closed_; }))
    throw TransportError("receive timed out");
  if (q_.empty()) throw TransportError("transport closed");
  Envelope e = std::move(q_.front());
  q_.pop_front();
  return e;
}

void Mailbox::close() {
  {
    std::lock_guard<std::mutex> lk(mu_);
    closed_ = true;
  }
  cv_.notify_all();
}

namespace {

unsigned slot(PartyId from, PartyId to) { return idx(from) * 3 + idx(to); }

}  // namespace

void InProcTransport::send(Envelope e) {
  if (e.from == e.to) throw ParameterError("party cannot send to itself");
  boxes_[slot(e.from, e.to)].push(std::move(e));
}

Envelope InProcTransport::recv(PartyId to, PartyId from, std::chrono::milliseconds timeout) {
  return boxes_[slot(from, to)].pop(timeout);
}

void InProcTransport::close() {
  for (auto& b : boxes_) b.close();
}

namespace {

int listen_on(std::uint16_t port, std::uint16_t& bound) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw TransportError("socket failed");
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in a{};
  a.sin_family = AF_INET;
  a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  a.sin_port = htons(port);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&a), sizeof a) != 0 || ::listen(fd, 4) != 0) {
    ::close(fd);
    throw TransportError("cannot listen on port " + std::to_string(port));
  }
  socklen_t len = sizeof a;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&a), &len);
  bound = ntohs(a.sin_port);
  return fd;
}

int connect_to(std::uint16_t port) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw TransportError("socket failed");
  sockaddr_in a{};
  a.sin_family = AF_INET;
  a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  a.sin_port = htons(port);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&a), sizeof a) != 0) {
    ::close(fd);
    throw TransportError("connect failed");
  }
  return fd;
}

void nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace

TcpTransport::TcpTransport(std::uint16_t base_port) {
  fd_.fill(-1);
  std::array<int, 3> lfd{};
  std::array<std::uint16_t, 3> ports{};
  for (unsigned i = 0; i < 3; ++i)
    lfd[i] = listen_on(base_port == 0 ? 0 : static_cast<std::uint16_t>(base_port + i), ports[i]);
  // the higher-numbered party dials the lower one
  for (unsigned lo = 0; lo < 3; ++lo) {
    for (unsigned hi = lo + 1; hi < 3; ++hi) {
      const int c = connect_to(ports[lo]);
      const int s = ::accept(lfd[lo], nullptr, nullptr);
      if (s < 0) throw TransportError("accept failed");
      nodelay(c);
      nodelay(s);
      fd_[hi * 3 + lo] = c;
      fd_[lo * 3 + hi] = s;
    }
  }
  for (int f : lfd) ::close(f);
  // the socket at `to` facing `from` carries from -> to traffic
  for (unsigned to = 0; to < 3; ++to)
    for (unsigned from = 0; from < 3; ++from)
      if (to != from)
        readers_.emplace_back(&TcpTransport::reader, this, fd_[to * 3 + from], party(from),
                              party(to));
}

TcpTransport::~TcpTransport() {
  close();
  for (auto& t : readers_) t.join();
  for (int f : fd_)
    if (f >= 0) ::close(f);
}

void TcpTransport::reader(int fd, PartyId from, PartyId to) {
  FrameDecoder dec(from, to);
  std::vector<std::uint8_t> buf(1 << 16);
  Mailbox& box = boxes_[slot(from, to)];
  for (;;) {
    const ssize_t n = ::recv(fd, buf.data(), buf.size(), 0);
    if (n <= 0) break;
    try {
      for (auto& e : dec.feed({buf.data(), static_cast<std::size_t>(n)})) box.push(std::move(e));
    } catch (const std::exception&) {
      break;
    }
  }
  box.close();
}

void TcpTransport::send(Envelope e) {
  if (e.from == e.to) throw ParameterError("party cannot send to itself");
  {
    std::lock_guard<std::mutex> lk(close_mu_);
    if (closed_) throw TransportError("send on closed transport");
  }
  const auto bytes = encode_frames(e);
  const unsigned s = slot(e.from, e.to);
  std::lock_guard<std::mutex> lk(send_mu_[s]);
  std::size_t off = 0;
  while (off < bytes.size()) {
    const ssize_t n = ::send(fd_[s], bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError("socket send failed");
    }
    off += static_cast<std::size_t>(n);
  }
}

Envelope TcpTransport::recv(PartyId to, PartyId from, std::chrono::milliseconds timeout) {
  return boxes_[slot(from, to)].pop(timeout);
}

void TcpTransport::close() {
  std::lock_guard<std::mutex> lk(close_mu_);
  if (closed_) return;
  closed_ = true;
  for (int f : fd_)
    if (f >= 0) ::shutdown(f, SHUT_RDWR);
  for (auto& b : boxes_) b.close();
}

std::unique_ptr<Transport> make_transport(const std::string& kind) {
  if (kind == "inproc") return std::make_unique<InProcTransport>();
  if (kind == "tcp") return std::make_unique<TcpTransport>();
  throw ParameterError("unknown transport: " + kind);
}

void CommMeter::record(const Envelope& e, unsigned flight) {
  std::lock_guard<std::mutex> lk(mu_);
  auto& s = is_offline(e.tag) ? off_[slot(e.from, e.to)] : on_[slot(e.from, e.to)];
  s.messages += 1;
  s.bytes += wire_bytes(e.elems.size(), e.width);
  s.bits += static_cast<u64>(e.elems.size()) * e.width;
  if (!is_offline(e.tag)) rounds_ = std::max(rounds_, flight);
}

void CommMeter::push_flight(PartyId from, PartyId to, unsigned flight) {
  std::lock_guard<std::mutex> lk(mu_);
  flights_[slot(from, to)].push_back(flight);
}

unsigned CommMeter::pop_flight(PartyId from, PartyId to) {
  std::lock_guard<std::mutex> lk(mu_);
  auto& q = flights_[slot(from, to)];
  if (q.empty()) return 0;
  const unsigned f = q.front();
  q.pop_front();
  return f;
}

void CommMeter::reset() {
  std::lock_guard<std::mutex> lk(mu_);
  on_.fill({});
  off_.fill({});
  for (auto& q : flights_) q.clear();
  rounds_ = 0;
}

LinkStats CommMeter::online(PartyId from, PartyId to) const {
  std::lock_guard<std::mutex> lk(mu_);
  return on_[slot(from, to)];
}

LinkStats CommMeter::offline(PartyId from, PartyId to) const {
  std::lock_guard<std::mutex> lk(mu_);
  return off_[slot(from, to)];
}

unsigned CommMeter::rounds() const {
  std::lock_guard<std::mutex> lk(mu_);
  return rounds_;
}

u64 CommMeter::bits_sent(PartyId from) const {
  std::lock_guard<std::mutex> lk(mu_);
  u64 b = 0;
  for (unsigned to = 0; to < 3; ++to) b += on_[idx(from) * 3 + to].bits;
  return b;
}

u64 CommMeter::max_bits_sent() const {
  return std::max({bits_sent(PartyId::P0), bits_sent(PartyId::P1), bits_sent(PartyId::P2)});
}

std::string CommMeter::table_csv() const {
  std::lock_guard<std::mutex> lk(mu_);
  std::ostringstream os;
  os << "phase,from,to,messages,bytes,bits\n";
  for (int ph = 0; ph < 2; ++ph) {
    const auto& t = ph == 0 ? on_ : off_;
    for (unsigned f = 0; f < 3; ++f)
      for (unsigned to = 0; to < 3; ++to) {
        if (f == to) continue;
        const auto& s = t[f * 3 + to];
        os << (ph == 0 ? "online" : "offline") << ",P" << f << ",P" << to << ',' << s.messages
           << ',' << s.bytes << ',' << s.bits << '\n';
      }
  }
  return os.str();
}

void Party::send(PartyId to, Tag tag, unsigned width, std::span<const u64> elems) {
  Envelope e{id_, to, tag, static_cast<std::uint8_t>(width), {elems.begin(), elems.end()}};
  const unsigned flight = is_offline(tag) ? 0 : depth_ + 1;
  meter_.record(e, flight);
  meter_.push_flight(id_, to, flight);
  t_.send(std::move(e));
}

std::vector<u64> Party::recv(PartyId from, Tag tag) {
  Envelope e = t_.recv(id_, from, timeout_);
  if (e.tag != tag)
    throw TransportError("tag mismatch: expected " + std::to_string(static_cast<int>(tag)) +
                         " got " + std::to_string(static_cast<int>(e.tag)));
  const unsigned f = meter_.pop_flight(from, id_);
  depth_ = std::max(depth_, f);
  return std::move(e.elems);
}

bool Party::holds(SeedId s) const {
  switch (id_) {
    case PartyId::P0: return s == SeedId::s01 || s == SeedId::s02 || s == SeedId::s012;
    case PartyId::P1: return s == SeedId::s01 || s == SeedId::s12 || s == SeedId::s012;
    case PartyId::P2: return s != SeedId::s01;
  }
  return false;
}

const Seed& Party::seed(SeedId s) const {
  if (!holds(s))
    throw ContractError("P" + std::to_string(index()) + " does not hold " +
                        std::string(seed_name(s)));
  return seeds_.get(s);
}

void run_parties(Transport& t, CommMeter& m, const SeedSet& seeds,
                 const std::function<void(Party&)>& fn, RunOptions opt) {
  std::array<std::exception_ptr, 3> err{};
  std::vector<std::thread> th;
  for (unsigned i = 0; i < 3; ++i) {
    th.emplace_back([&, i] {
      try {
        Party p(party(i), t, m, seeds, opt.exec, opt.timeout);
        fn(p);
      } catch (...) {
        err[i] = std::current_exception();
        t.close();
      }
    });
  }
  for (auto& x : th) x.join();
  // prefer the root cause over the closures it triggered in the other parties
  std::exception_ptr first;
  for (auto& e : err) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const TransportError&) {
      if (!first) first = e;
    } catch (...) {
      std::rethrow_exception(e);
    }
  }
  if (first) std::rethrow_exception(first);
}

LinkProfile link_profile(const std::string& name) {
  if (name == "lan1") return {"lan1", 5e9, 0.2};
  if (name == "lan2") return {"lan2", 1e9, 0.6};
  if (name == "wan") return {"wan", 100e6, 40.0};
  throw ParameterError("unknown link profile: " + name);
}

double simulate_latency(unsigned rounds, u64 bits, const LinkProfile& link) {
  return rounds * link.rtt_ms + static_cast<double>(bits) / link.bandwidth_bps * 1e3;
}

}  // namespace trunclab

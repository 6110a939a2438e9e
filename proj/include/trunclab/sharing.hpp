#pragma once

#include <array>
#include <span>
#include <vector>

#include "trunclab/net.hpp"
#include "trunclab/random.hpp"
#include "trunclab/ring.hpp"

namespace trunclab {

// 2-of-2 additive sharing held by P0 and P1
struct Share2 {
  RingElement part0, part1;
  RingSpec ring() const { return part0.ring(); }
};

// [x]_0 = x + R, [x]_1 = -R
Share2 share2(const RingElement& x, const RingElement& R);
RingElement open2(const Share2& s);
Share2 reshare2(const Share2& s, RandomStream& rng);

// 2-of-3 replicated sharing; party i holds (c[i], c[i+1])
struct RssShare {
  std::array<u64, 3> c{};
  RingSpec ring;
};

RssShare rss_share(const RingElement& x, RandomStream& rng);
RingElement rss_open(const RssShare& s);
RssShare rss_add(const RssShare& a, const RssShare& b);

// what one party holds for a batch. In the 2-of-2 setting P2 holds zeros;
// only the (public) batch size matters for it.
struct Local2 {
  RingSpec ring;
  std::vector<u64> v;
  std::size_t size() const { return v.size(); }
};

struct LocalRss {
  RingSpec ring;
  std::vector<u64> a, b;  // components (i, i+1)
  std::size_t size() const { return a.size(); }
};

Local2 local_view(std::span<const Share2> xs, PartyId p);
std::vector<Share2> join(const Local2& l0, const Local2& l1);
LocalRss local_view(std::span<const RssShare> xs, PartyId p);
std::vector<RssShare> join(const LocalRss& l0, const LocalRss& l1, const LocalRss& l2);

// Beaver triples; P0's part and P2's copy come from seed02, P1's a,b from
// seed12, P2 sends [c]_1 to P1. P2's copy holds the opened a and b.
struct LocalTriples {
  std::vector<u64> a, b, c;
};

LocalTriples triples_from_seeds(Party& p, std::size_t n, RingSpec ring);

// P0/P1 open d = x - a and e = y - b, one round
Local2 beaver_mul(Party& p, const Local2& x, const Local2& y, const LocalTriples& t);

// local cross terms plus pairwise-seed zero shares, then each party passes its
// term to its predecessor
LocalRss rss_mul_reshare(Party& p, const LocalRss& x, const LocalRss& y, Tag tag);

// opens a batch to P0 and P1 (2-of-2) or to everyone (RSS)
std::vector<u64> open_local(Party& p, const Local2& x, Tag tag = Tag::output_open);
std::vector<u64> open_local(Party& p, const LocalRss& x);

}  // namespace trunclab

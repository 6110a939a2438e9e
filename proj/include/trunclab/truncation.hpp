#pragma once

#include <span>
#include <vector>

#include "trunclab/exec.hpp"
#include "trunclab/net.hpp"
#include "trunclab/sharing.hpp"

namespace trunclab {

enum class MaskMode { random, fixed };
enum class TrcProtocol { secureml, aby3, det };

// ---- share-wise rules, one party's share at a time ----

// P0: cut(s, k); P1: 2^ell - cut(2^ell - s, k)
u64 trc_secureml_local(PartyId p, u64 share, unsigned k, RingSpec r);
// same rules reduced mod 2^(ell-k)
u64 trc_det_local(PartyId p, u64 share, unsigned k, RingSpec r);
// same rules on bits [k1, ell-k2), reduced mod 2^(ell-k1-k2)
u64 trc_det_mid_local(PartyId p, u64 share, unsigned k1, unsigned k2, RingSpec r);

// sign-preserving shift of the opened value
u64 shift_signed(u64 alpha, unsigned k, RingSpec r);
// P0 takes the public alpha/2^k, both subtract their share of r'
u64 aby3_finish_local(PartyId p, u64 alpha, u64 rp_share, unsigned k, RingSpec r);

// batch kernels; parallel and serial versions produce identical output
void trc_secureml_batch(PartyId p, std::span<const u64> in, std::span<u64> out, unsigned k,
                        RingSpec r, Exec ex);
void trc_det_mid_batch(PartyId p, std::span<const u64> in, std::span<u64> out, unsigned k1,
                       unsigned k2, RingSpec r, Exec ex);

// ---- whole-view operations ----

Share2 trc_secureml(const Share2& x, unsigned k);
Share2 trc_det(const Share2& x, unsigned k);
Share2 trc_det_mid(const Share2& x, unsigned k1, unsigned k2);

// r uniform with r' = floor(r / 2^k) in the signed sense; fixed mode uses r = 2^k
struct TruncPair {
  RingElement r, rp;
};
TruncPair draw_trunc_pair(RingSpec ring, unsigned k, MaskMode mode, RandomStream& rng);

// ---- interactive, SPMD ----

struct LocalPairs {
  std::vector<u64> r, rp;
};

// P2 draws the pairs from seed2; P0's shares come from seed02, P2 sends P1's.
LocalPairs trunc_pairs(Party& p, std::size_t n, RingSpec ring, unsigned k, MaskMode mode);

// opens alpha = x + r between P0 and P1 in one round
Local2 trc_aby3(Party& p, const Local2& x, const LocalPairs& pairs, unsigned k);
// convenience: pairs then truncation
Local2 trc_aby3(Party& p, const Local2& x, unsigned k, MaskMode mode);

// pairs from a dealer (trusted preprocessing)
struct RssPairs {
  std::vector<RssShare> r, rp;
};
RssPairs rss_trunc_pairs(std::size_t n, RingSpec ring, unsigned k, MaskMode mode,
                         RandomStream& rng);
LocalRss trc_aby3_rss(Party& p, const LocalRss& x, const LocalRss& r, const LocalRss& rp,
                      unsigned k);

// deterministic truncation brought back to Z_{2^ell}. After a public offset the
// wrap of the two Z_{2^(ell-k)} shares is msb0 OR msb1, which costs one Beaver
// product. Exact for |result| < 2^(ell-k-2).
Local2 trc_det_lift(Party& p, const Local2& x, unsigned k);

// x truncated by ceil(frac/2), y by floor(frac/2), then multiplied
Local2 trc_then_mult(Party& p, const Local2& x, const Local2& y, unsigned frac,
                     TrcProtocol trc, MaskMode mode);

}  // namespace trunclab

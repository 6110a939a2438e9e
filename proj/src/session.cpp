#include "trunclab/session.hpp"

#include <array>

namespace trunclab {

std::vector<Share2> run_ubl(Session& s, std::span<const Share2> x, const Program2& fn) {
  std::array<Local2, 3> in, out;
  for (unsigned i = 0; i < 3; ++i) in[i] = local_view(x, party(i));
  run_parties(s.transport, s.meter, s.seeds,
              [&](Party& p) { out[p.index()] = fn(p, in[p.index()]); }, s.opt);
  return join(out[0], out[1]);
}

std::vector<RssShare> run_rss(Session& s, std::span<const RssShare> x, const ProgramRss& fn) {
  std::array<LocalRss, 3> in, out;
  for (unsigned i = 0; i < 3; ++i) in[i] = local_view(x, party(i));
  run_parties(s.transport, s.meter, s.seeds,
              [&](Party& p) { out[p.index()] = fn(p, in[p.index()]); }, s.opt);
  return join(out[0], out[1], out[2]);
}

}  // namespace trunclab

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "trunclab/net.hpp"
#include "trunclab/sharing.hpp"

namespace trunclab {

// a transport, a meter and the seeds for one simulated three-party run
struct Session {
  Transport& transport;
  CommMeter& meter;
  SeedSet seeds;
  RunOptions opt{};
};

using Program2 = std::function<Local2(Party&, const Local2&)>;
using ProgramRss = std::function<LocalRss(Party&, const LocalRss&)>;

// splits the input into party views, runs, joins P0's and P1's outputs
std::vector<Share2> run_ubl(Session& s, std::span<const Share2> x, const Program2& fn);
std::vector<RssShare> run_rss(Session& s, std::span<const RssShare> x, const ProgramRss& fn);

}  // namespace trunclab

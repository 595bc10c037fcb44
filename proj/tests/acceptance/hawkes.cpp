#include <cmath>
#include <set>

#include "acceptance.hpp"
#include "book_flow_client.hpp"
#include "matchbook/hawkes/flow.hpp"
#include "matchbook/hawkes/process.hpp"
#include "stats.hpp"

namespace matchbook::acceptance {

namespace {

using namespace hawkes;

HawkesParams univariate(double mu, double alpha, double beta) {
  HawkesParams p;
  p.mu = Eigen::VectorXd::Constant(1, mu);
  p.alpha = Eigen::MatrixXd::Constant(1, 1, alpha);
  p.beta = Eigen::MatrixXd::Constant(1, 1, beta);
  return p;
}

Outcome poisson() {
  constexpr double kMu = 2.0, kT = 1000.0;
  std::mt19937_64 rng(31);
  const auto events = simulate(univariate(kMu, 0.0, 1.0), kT, rng);
  const double n = static_cast<double>(events.size());
  const double sigma = std::sqrt(kMu * kT);
  std::vector<double> gaps;
  double prev = 0;
  for (const auto& e : events) gaps.push_back(e.time - prev), prev = e.time;
  const double ks = testing::ks_exponential(gaps, kMu);
  const double crit = testing::ks_critical_1pct(gaps.size());
  Failures f;
  if (std::abs(n - kMu * kT) > 3 * sigma) f.add("count {} outside {} +- {:.1f}", n, kMu * kT, 3 * sigma);
  if (ks >= crit) f.add("KS {:.4f} >= {:.4f}", ks, crit);
  return f.outcome(fmt::format("mu=2, T=1000: {} events vs 2000 +- {:.1f} (3 sigma); KS D={:.4f} < {:.4f} (1%)", n,
                               3 * sigma, ks, crit));
}

Outcome branching() {
  const auto p = univariate(1.0, 0.5, 1.0);
  std::vector<double> counts;
  for (int seed = 0; seed < 200; ++seed) {
    std::mt19937_64 rng(7000 + seed);
    counts.push_back(static_cast<double>(simulate(p, 1000.0, rng).size()));
  }
  const auto [mean, se] = testing::mean_se(counts);
  const double want = 1.0 * 1000.0 / (1.0 - 0.5 / 1.0);
  Failures f;
  if (std::abs(mean - want) > 3 * se) f.add("mean {:.1f} outside {} +- {:.1f}", mean, want, 3 * se);
  return f.outcome(fmt::format("mu=1, alpha=0.5, beta=1, T=1000, 200 runs: mean {:.1f} vs {} +- {:.1f} (3 SE)", mean,
                               want, 3 * se));
}

Outcome full_default() {
  const auto props = Properties::load(MB_DATA_DIR "/hawkesData.properties");
  const auto p = params_from_properties(props);
  auto cfg = SimConfig::from_properties(props);
  Failures f;
  if (p.dimension() != 8) f.add("dimension {}", p.dimension());
  const auto events = simulate_flow(p, cfg);
  std::set<int> types;
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (i > 0 && !(events[i].time > events[i - 1].time)) {
      f.add("event {} not after its predecessor", i);
      break;
    }
    if (events[i].type < 0 || events[i].type >= kEventTypes) f.add("event {} has type {}", i, events[i].type);
    types.insert(events[i].type);
  }
  if (types.size() != 8) f.add("{} of 8 types seen", types.size());
  const double n = static_cast<double>(events.size());
  if (std::abs(n - 110000.0) > 11000.0) f.add("{} events, not within 10% of 110000", n);

  // The same flow mapped to orders against an in-process book.
  cfg.horizon = 5000;
  testing::BookFlowClient client;
  const auto summary = run_simulation(client, p, cfg);
  if (summary.aborted) f.add("run aborted: {}", summary.error);
  std::uint64_t tagged = 0;
  for (auto c : summary.by_type) tagged += c;
  if (tagged != summary.events) f.add("{} tagged of {} events", tagged, summary.events);
  return f.outcome(fmt::format("default parameters, horizon {:.0f}s: {} strictly increasing events over all 8 types "
                               "(expected ~110000 within 10%); {} orders placed through the flow mapper",
                               SimConfig::from_properties(props).horizon, events.size(), summary.submitted));
}

}  // namespace

Criterion hawkes_statistics() {
  return {"hawkes_statistics",
          "thinning simulator statistics",
          {{"poisson", poisson}, {"branching_ratio", branching}, {"default_8_variate", full_default}}};
}

}  // namespace matchbook::acceptance

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "acceptance.hpp"
#include "gateway_support.hpp"
#include "matchbook/app/server.hpp"
#include "matchbook/perf/histogram.hpp"
#include "matchbook/perf/throughput.hpp"

namespace matchbook::acceptance {

namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;

Outcome published_row(std::uint64_t orders, std::chrono::milliseconds duration, std::uint64_t want) {
  const auto got = perf::throughput(orders, duration);
  const auto detail = fmt::format("{} orders in {} -> {}/s, expected {}/s (exact)", orders,
                                  perf::format_duration(duration), got, want);
  return {got == want, detail};
}

Outcome row1() { return published_row(111646, 48820ms, 2287); }
Outcome row2() { return published_row(224562, 263981ms, 850); }

Outcome desk_run() {
  const fs::path dir = fs::temp_directory_path() / fmt::format("mb_accept_desk_{}", ::getpid());
  fs::remove_all(dir);
  app::ServerConfig cfg;
  cfg.clients = {testing::loopback_client(1, 1, testing::free_udp_port(), testing::free_udp_port(), "test111111")};
  gw::SecurityRecord s;
  s.config.security_id = 1;
  s.config.reference_price = Price{25034};
  s.name = "STOCK1";
  cfg.securities = {s};
  cfg.results_dir = dir;
  cfg.event_log = dir / "events.ndjson";
  cfg.sim.horizon = 20000;
  cfg.sim.seed = 2020;
  app::Server server(cfg);
  server.start();
  server.simulator().start(1, 1);
  const auto summary = server.simulator().wait(1);
  server.stop();

  Failures f;
  if (!summary || summary->aborted) return {false, summary ? "run aborted: " + summary->error : "no run"};
  const auto elapsed = summary->end - summary->start;
  const auto rate = perf::throughput(summary->submitted, elapsed);
  if (rate < 2000) f.add("{}/s below 2000/s", rate);
  if (summary->update_timeouts > 0) f.add("{} market data waits timed out", summary->update_timeouts);

  std::ifstream tp(gw::result_paths(dir, 1).throughput);
  std::string header, row;
  std::getline(tp, header);
  std::getline(tp, row);
  f.check(header == "Orders,Duration,Throughput" && !row.empty(), "throughput file missing");
  fs::remove_all(dir);
  return f.outcome(fmt::format("1 client-stock pair over loopback UDP: {} orders in {} -> {}/s end to end, "
                               "needs >= 2000/s; server-side record {}",
                               summary->submitted, perf::format_duration(elapsed), rate, row));
}

std::int64_t exact_percentile(const std::vector<std::int64_t>& sorted, double q) {
  const std::uint64_t n = sorted.size();
  const auto q4 = static_cast<std::uint64_t>(std::llround(q * 10000));
  auto rank = static_cast<std::size_t>((q4 * n + 999999) / 1000000);
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted[rank - 1];
}

Outcome histogram() {
  constexpr int kSamples = 1'000'000;
  std::mt19937_64 rng(4);
  std::lognormal_distribution<double> dist(std::log(250.0), 1.5);
  std::vector<std::int64_t> v(kSamples);
  perf::LatencyHistogram h;
  for (auto& x : v) {
    x = std::clamp<std::int64_t>(static_cast<std::int64_t>(dist(rng)), 1, perf::LatencyHistogram::kHighest);
    h.record(x);
  }
  std::sort(v.begin(), v.end());
  Failures f;
  double worst = 0;
  int points = 0;
  std::int64_t prev = 0;
  for (int i = 0; i <= 100000; ++i) {
    const double q = i / 1000.0;
    const auto got = h.percentile(q);
    if (got < prev) f.add("percentile({}) = {} below the previous {}", q, got, prev);
    prev = got;
    if (i % 10 != 0) continue;
    const auto want = exact_percentile(v, q);
    const double err = std::abs(static_cast<double>(got - want)) / static_cast<double>(want);
    worst = std::max(worst, err);
    ++points;
    if (err > 0.001) f.add("q={} got {} exact {}", q, got, want);
  }
  for (double q : {90.0, 99.0, 99.9, 99.99, 99.999}) {
    const auto want = exact_percentile(v, q);
    const double err = std::abs(static_cast<double>(h.percentile(q) - want)) / static_cast<double>(want);
    worst = std::max(worst, err);
    if (err > 0.001) f.add("q={} off by {:.5f}", q, err);
  }
  return f.outcome(fmt::format("1e6 samples: {} percentiles within {:.4f}% of the sorted-array value (limit 0.1%), "
                               "monotone over 100001 steps",
                               points + 5, worst * 100));
}

}  // namespace

Criterion throughput() {
  return {"throughput",
          "published throughput arithmetic, desk-scale rate, histogram accuracy",
          {{"published_row1", row1}, {"published_row2", row2}, {"desk_loopback", desk_run}, {"histogram", histogram}}};
}

}  // namespace matchbook::acceptance

#include <csignal>
#include <filesystem>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "matchbook/app/server.hpp"
#include "matchbook/perf/histogram.hpp"
#include "matchbook/perf/throughput.hpp"
#include "matchbook/sessions/engine.hpp"
#include "matchbook/sessions/schedule.hpp"

namespace fs = std::filesystem;
using namespace matchbook;

namespace {

volatile std::sig_atomic_t g_stop = 0;
extern "C" void on_signal(int) { g_stop = 1; }

struct Common {
  fs::path data{"data"};
  fs::path out{"results"};
  std::string log_level{"info"};
};

void add_common(CLI::App& cmd, Common& c) {
  cmd.add_option("--data", c.data, "directory with ClientData.csv, Stock.csv and the properties files")
      ->check(CLI::ExistingDirectory);
  cmd.add_option("--out", c.out, "results and event log directory");
  cmd.add_option("--log-level", c.log_level, "trace, debug, info, warn, error");
}

app::ServerConfig load_config(const Common& c, bool with_schedule) {
  fs::create_directories(c.out);
  auto cfg = app::ServerConfig::from_data_dir(c.data, c.out);
  auto cron = c.data / "tradingSessionsCron.properties";
  if (with_schedule && fs::exists(cron)) {
    cfg.schedule = load_schedule_file(cron);
    cfg.initial_session = active_at(*cfg.schedule, SystemClock{}.now());
  }
  return cfg;
}

int serve(const Common& c, int port, const std::string& host, bool schedule) {
  auto cfg = load_config(c, schedule);
  cfg.http_port = port;
  cfg.http_host = host;
  app::Server server(std::move(cfg));
  server.start();
  spdlog::info("console API on http://{}:{}", host, *server.http_port());
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  spdlog::info("shutting down");
  server.stop();
  return 0;
}

int simulate(const Common& c, std::vector<ClientId> clients, std::optional<double> horizon,
             std::optional<std::uint64_t> seed) {
  auto cfg = load_config(c, false);
  if (horizon) cfg.sim.horizon = *horizon;
  if (seed) cfg.sim.seed = *seed;
  if (clients.empty())
    for (const auto& r : cfg.clients) clients.push_back(r.comp_id);
  app::Server server(cfg);
  server.start();
  auto& sim = server.simulator();
  for (auto id : clients) {
    auto rec = server.registry().find(id);
    if (!rec) throw std::invalid_argument(fmt::format("unknown client {}", id));
    sim.start(id, rec->security_id);
  }
  int status = 0;
  for (auto id : clients) {
    auto s = sim.wait(id);
    auto secs = std::chrono::duration<double>(s->end - s->start).count();
    std::uint64_t rate = secs > 0 ? perf::throughput(s->submitted, s->end - s->start) : 0;
    std::cout << fmt::format("client {}: events={} submitted={} accepted={} rejected={} degraded={} "
                             "timeouts={} duration={:.3f}s throughput={}/s{}\n",
                             id, s->events, s->submitted, s->accepted, s->rejected, s->degraded, s->update_timeouts,
                             secs, rate, s->aborted ? " ABORTED: " + s->error : "");
    if (s->aborted) status = 1;
  }
  server.stop();
  std::cout << "results in " << c.out.string() << "\n";
  return status;
}

// Engine-internal processing time per order: the matching call alone, no
// network. Random limit/market mix around a fixed mid.
int bench(std::uint64_t orders, std::uint64_t seed, const std::optional<fs::path>& out) {
  SecurityConfig sc;
  sc.reference_price = Price{25034};
  sc.circuit_breaker_pct = 1e9;
  SecurityEngine engine(sc);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> offset(-20, 20), lots(1, 20), pick(0, 99);
  perf::LatencyHistogram hist;
  Timestamp now = SystemClock{}.now();
  auto t0 = std::chrono::system_clock::now();
  for (std::uint64_t i = 0; i < orders; ++i) {
    Order o;
    o.client_id = 1;
    o.security_id = 1;
    o.side = (rng() & 1) ? Side::Buy : Side::Sell;
    o.qty = Qty{100 * lots(rng)};
    o.display_qty = o.qty;
    o.submitted_at = now;
    if (pick(rng) < 10) {
      o.order_type = OrderType::Market;
      o.tif = TimeInForce::IOC;
    } else {
      o.price = Price{25045 + offset(rng) + (o.side == Side::Buy ? -5 : 5)};
    }
    auto start = std::chrono::steady_clock::now();
    auto res = engine.submit(o, now);
    hist.record_clamped(std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start)
                            .count());
    (void)res;
  }
  auto t1 = std::chrono::system_clock::now();
  for (double q : {50.0, 90.0, 99.0, 99.9, 100.0})
    std::cout << fmt::format("p{:<5} {:>10} ns\n", q, hist.percentile(q));
  std::cout << fmt::format("orders {} in {} -> {}/s\n", orders, perf::format_duration(t1 - t0),
                           perf::throughput(orders, t1 - t0));
  if (out) perf::export_histogram(hist, *out);
  return 0;
}

int throughput_cmd(std::uint64_t orders, const std::string& duration, std::optional<double> seconds) {
  std::chrono::nanoseconds d{};
  if (seconds)
    d = std::chrono::round<std::chrono::nanoseconds>(std::chrono::duration<double>(*seconds));
  else
    d = perf::parse_duration(duration);
  std::cout << perf::throughput(orders, d) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"matchbook: matching engine, gateways and Hawkes load generator"};
  app.require_subcommand(1);

  Common common;
  auto* serve_cmd = app.add_subcommand("serve", "run the venue with the console API until interrupted");
  add_common(*serve_cmd, common);
  int port = gw::kDefaultConsolePort;
  std::string host = "127.0.0.1";
  bool schedule = false;
  serve_cmd->add_option("--http-port", port, "console API port");
  serve_cmd->add_option("--http-host", host, "console API bind address");
  serve_cmd->add_flag("--schedule", schedule, "follow tradingSessionsCron.properties on the wall clock");

  auto* sim_cmd = app.add_subcommand("simulate", "run Hawkes order flow through the gateways and write results");
  add_common(*sim_cmd, common);
  std::vector<ClientId> clients;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
  sim_cmd->add_option("--client", clients, "client ids to run (default: all)");
  sim_cmd->add_option("--horizon", horizon, "simulated seconds");
  sim_cmd->add_option("--seed", seed, "rng seed");

  auto* bench_cmd = app.add_subcommand("bench", "engine-internal latency benchmark");
  std::uint64_t orders = 1'000'000, bench_seed = 1;
  std::optional<fs::path> hgrm;
  bench_cmd->add_option("--orders", orders);
  bench_cmd->add_option("--seed", bench_seed);
  bench_cmd->add_option("--export", hgrm, "write the percentile table here");

  auto* tp_cmd = app.add_subcommand("throughput", "orders per second from a count and a duration");
  std::uint64_t tp_orders = 0;
  std::string duration;
  std::optional<double> seconds;
  tp_cmd->add_option("--orders", tp_orders)->required();
  auto* dur = tp_cmd->add_option("--duration", duration, "hh:mm:ss.SSS");
  auto* sec = tp_cmd->add_option("--seconds", seconds);
  dur->excludes(sec);
  sec->excludes(dur);
  tp_cmd->callback([&] {
    if (!*dur && !*sec) throw CLI::RequiredError("--duration or --seconds");
  });

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(common.log_level));
  try {
    if (*serve_cmd) return serve(common, port, host, schedule);
    if (*sim_cmd) return simulate(common, clients, horizon, seed);
    if (*bench_cmd) return bench(orders, bench_seed, hgrm);
    if (*tp_cmd) return throughput_cmd(tp_orders, duration, seconds);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include "matchbook/gateways/trading_gateway.hpp"

#include <spdlog/spdlog.h>

#include <fstream>
#include <limits>

#include "matchbook/perf/throughput.hpp"

namespace matchbook::gw {

namespace fs = std::filesystem;

ResultFiles result_paths(const fs::path& dir, SecurityId id) {
  auto name = [&](const char* stem, const char* ext) { return dir / (stem + std::to_string(id) + ext); };
  return {name("LimitOrders_", ".csv"), name("Trades_", ".csv"), name("Snapshot_", ".csv"),
          name("Latency_", ".hgrm"), name("Throughput_", ".txt")};
}

TradingGateway::TradingGateway(ClientRegistry& registry, Exchange& exchange, FrameSender& sender,
                               TradingGatewayOptions options)
    : registry_(registry), exchange_(exchange), sender_(sender), options_(std::move(options)) {}

TradingGateway::~TradingGateway() { stop(); }

OutputListener TradingGateway::listener() {
  return [this](const OutputContext& ctx, const EngineOutput& out, const SecurityState& s) { on_output(ctx, out, s); };
}

void TradingGateway::start() {
  std::set<std::pair<std::string, std::uint16_t>> seen;
  for (const auto& c : registry_.all()) {
    if (!seen.insert({c.ng_input.host, c.ng_input.port}).second) continue;
    listeners_.push_back(std::make_unique<UdpListener>(
        c.ng_input, [this](const proto::Frame& f, const proto::SocketAddress& from) {
          handle(f, std::chrono::steady_clock::now(), from);
        }));
    spdlog::info("trading gateway listening on {}", c.ng_input.url());
  }
}

void TradingGateway::stop() {
  for (auto& l : listeners_) l->stop();
  listeners_.clear();
}

std::vector<std::uint16_t> TradingGateway::bound_ports() const {
  std::vector<std::uint16_t> ports;
  for (const auto& l : listeners_) ports.push_back(l->port());
  return ports;
}

std::uint64_t TradingGateway::decode_errors() const {
  std::uint64_t n = 0;
  for (const auto& l : listeners_) n += l->decode_errors();
  return n;
}

bool TradingGateway::logged_in(ClientId id) const {
  std::lock_guard lk(mu_);
  return sessions_.count(id) != 0;
}

std::size_t TradingGateway::logged_in_count() const {
  std::lock_guard lk(mu_);
  return sessions_.size();
}

void TradingGateway::reply(ClientId client, const std::optional<proto::SocketAddress>& from, proto::Body body) {
  if (auto rec = registry_.find(client)) {
    sender_.send(rec->ng_output, client, std::move(body));
  } else if (from) {
    std::string ip = from->to_string();
    ip = ip.substr(0, ip.rfind(':'));
    sender_.send(proto::Endpoint{ip, from->port(), 0}, client, std::move(body));
  }
}

void TradingGateway::handle(const proto::Frame& frame, SteadyTime received,
                            std::optional<proto::SocketAddress> from) {
  ClientId client = frame.client_id;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, proto::Login>) {
          on_login(frame, m, from);
        } else if constexpr (std::is_same_v<M, proto::Logout>) {
          on_logout(frame, from);
        } else if constexpr (std::is_same_v<M, proto::NewOrder>) {
          auto reject = [&](RejectReason r) {
            reply(client, from, proto::OrderAck{0, proto::AckStatus::Rejected, static_cast<std::uint8_t>(r)});
          };
          if (!logged_in(client)) return reject(RejectReason::NotLoggedIn);
          auto rec = registry_.find(client);
          // A client trades the one security it is registered for.
          if (!rec || !exchange_.has_security(m.security_id) || m.security_id != rec->security_id)
            return reject(RejectReason::UnknownSecurity);
          exchange_.submit(m.security_id, client, m, received);
        } else if constexpr (std::is_same_v<M, proto::CancelOrder>) {
          auto reject = [&](RejectReason r) {
            reply(client, from,
                  proto::OrderAck{m.order_id, proto::AckStatus::CancelRejected, static_cast<std::uint8_t>(r)});
          };
          if (!logged_in(client)) return reject(RejectReason::NotLoggedIn);
          auto rec = registry_.find(client);
          if (!rec || !exchange_.has_security(rec->security_id)) return reject(RejectReason::UnknownSecurity);
          exchange_.cancel(rec->security_id, client, m.order_id, m.side);
        } else if constexpr (std::is_same_v<M, proto::AdminCommand>) {
          if (!exchange_.has_security(frame.client_id)) {
            spdlog::warn("admin command for unknown security {}", frame.client_id);
            return;
          }
          admin(frame);
        } else {
          spdlog::debug("trading gateway ignores {} from {}", proto::to_string(proto::template_of(frame.body)), client);
        }
      },
      frame.body);
}

std::future<AdminResult> TradingGateway::admin(const proto::Frame& frame) {
  const auto* cmd = std::get_if<proto::AdminCommand>(&frame.body);
  if (!cmd) throw std::invalid_argument("not an AdminCommand frame");
  if (!exchange_.has_security(frame.client_id))
    throw std::out_of_range("unknown security " + std::to_string(frame.client_id));
  return exchange_.admin(frame.client_id, cmd->command);
}

void TradingGateway::on_login(const proto::Frame& f, const proto::Login& m,
                              const std::optional<proto::SocketAddress>& from) {
  auto rec = registry_.find(m.comp_id);
  proto::LoginStatus status = proto::LoginStatus::Ok;
  if (!rec || rec->password != m.password || f.client_id != m.comp_id) {
    status = proto::LoginStatus::InvalidCredentials;
  } else {
    std::lock_guard lk(mu_);
    if (!sessions_.insert(m.comp_id).second) status = proto::LoginStatus::AlreadyLoggedIn;
  }
  reply(f.client_id, from, proto::LoginResponse{status});
}

void TradingGateway::on_logout(const proto::Frame& f, const std::optional<proto::SocketAddress>& from) {
  bool was_in = false;
  bool last = false;
  {
    std::lock_guard lk(mu_);
    was_in = sessions_.erase(f.client_id) != 0;
    last = was_in && sessions_.empty();
  }
  if (last && options_.results_dir) {
    // Let orders still queued from this client settle before the files are cut.
    exchange_.drain();
    try {
      write_results(*options_.results_dir);
    } catch (const std::exception& e) {
      spdlog::error("writing results failed: {}", e.what());
    }
  }
  reply(f.client_id, from, proto::LogoutResponse{was_in ? proto::LoginStatus::Ok : proto::LoginStatus::NotLoggedIn});
}

namespace {

struct SecurityResults {
  std::vector<perf::LimitOrderRow> orders;
  std::vector<perf::TradeRow> trades;
  std::vector<perf::SnapshotRow> snapshot;
  perf::LatencyHistogram latency;
  std::optional<perf::RunStats> run;
};

}  // namespace

std::vector<ResultFiles> TradingGateway::write_results(const fs::path& dir) {
  fs::create_directories(dir);
  std::vector<ResultFiles> written;
  for (SecurityId id : exchange_.securities()) {
    SecurityResults r = exchange_
                            .query(id,
                                   [](const SecurityState& s) {
                                     SecurityResults out;
                                     out.orders = s.limit_orders;
                                     out.trades = s.trades;
                                     auto snap = s.engine.book().snapshot(std::numeric_limits<int>::max());
                                     for (const auto& l : snap.bids)
                                       out.snapshot.push_back({Side::Buy, l.price.value, l.total_qty.value});
                                     for (const auto& l : snap.asks)
                                       out.snapshot.push_back({Side::Sell, l.price.value, l.total_qty.value});
                                     out.latency = s.latency;
                                     if (s.first_order) out.run = perf::RunStats{*s.first_order, *s.last_order, s.submitted};
                                     return out;
                                   })
                            .get();
    ResultFiles files = result_paths(dir, id);
    perf::write_limit_orders_csv(files.limit_orders, r.orders);
    perf::write_trades_csv(files.trades, r.trades);
    perf::write_snapshot_csv(files.snapshot, r.snapshot);
    perf::export_histogram(r.latency, files.latency);
    std::ofstream tp(files.throughput);
    tp << "Orders,Duration,Throughput\n";
    if (r.run && r.run->duration().count() > 0)
      tp << r.run->orders << ',' << perf::format_duration(r.run->duration()) << ',' << perf::throughput(*r.run)
         << '\n';
    if (!tp) throw std::runtime_error("cannot write " + files.throughput.string());
    written.push_back(files);
  }
  ++results_written_;
  spdlog::info("result files written to {}", dir.string());
  return written;
}

void TradingGateway::on_output(const OutputContext& ctx, const EngineOutput& out, const SecurityState& s) {
  auto to_owner = [&](OrderId id, proto::Body body) {
    if (auto owner = s.owner(id)) reply(*owner, std::nullopt, std::move(body));
  };
  for (const auto& e : out.events) {
    std::visit(
        [&](const auto& ev) {
          using E = std::decay_t<decltype(ev)>;
          if constexpr (std::is_same_v<E, Ack>) {
            if (!ctx.requester) return;
            reply(*ctx.requester, std::nullopt, proto::OrderAck{ev.order_id, proto::AckStatus::Accepted, 0});
            std::int64_t price = ctx.order ? ctx.order->price : 0;
            std::int64_t qty = ctx.order ? ctx.order->qty : 0;
            reply(*ctx.requester, std::nullopt, proto::ExecutionReport{ev.order_id, 0, price, 0, qty});
          } else if constexpr (std::is_same_v<E, Reject>) {
            if (!ctx.requester) return;
            auto code = static_cast<std::uint8_t>(ev.reason);
            if (ctx.cause == Cause::Cancel)
              reply(*ctx.requester, std::nullopt, proto::OrderAck{ctx.cancel_target, proto::AckStatus::CancelRejected, code});
            else
              reply(*ctx.requester, std::nullopt, proto::OrderAck{0, proto::AckStatus::Rejected, code});
          } else if constexpr (std::is_same_v<E, TradeEvent>) {
            to_owner(ev.buy_order_id, proto::ExecutionReport{ev.buy_order_id, ev.trade.trade_id, ev.trade.price.value,
                                                             ev.trade.qty.value, ev.buy_leaves.value});
            to_owner(ev.sell_order_id, proto::ExecutionReport{ev.sell_order_id, ev.trade.trade_id,
                                                              ev.trade.price.value, ev.trade.qty.value,
                                                              ev.sell_leaves.value});
          } else if constexpr (std::is_same_v<E, Expire>) {
            to_owner(ev.order_id, proto::OrderAck{ev.order_id, proto::AckStatus::Expired, 0});
          } else if constexpr (std::is_same_v<E, CancelAck>) {
            to_owner(ev.order_id, proto::OrderAck{ev.order_id, proto::AckStatus::Cancelled, 0});
          } else if constexpr (std::is_same_v<E, StopElected>) {
            to_owner(ev.order_id, proto::OrderAck{ev.order_id, proto::AckStatus::StopElected, 0});
          }
        },
        e);
  }
}

}  // namespace matchbook::gw

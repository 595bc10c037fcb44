#include "matchbook/client/client.hpp"

#include "matchbook/protocol/codec.hpp"

namespace matchbook::client {

ClientHandle::ClientHandle(gw::ClientRecord record, ClientOptions options)
    : record_(std::move(record)), options_(options) {}

ClientHandle::~ClientHandle() {
  if (logged_in_) {
    try {
      end();
    } catch (const std::exception&) {
    }
  }
  close();
}

void ClientHandle::open() {
  if (running_) return;
  ng_socket_ = proto::UdpSocket::bind(record_.ng_output);
  md_socket_ = proto::UdpSocket::bind(record_.mdg_output);
  out_socket_ = proto::UdpSocket::open();
  running_ = true;
  ng_thread_ = std::thread([this] { ng_loop(); });
  md_thread_ = std::thread([this] { md_loop(); });
}

void ClientHandle::close() {
  if (!running_) return;
  running_ = false;
  ng_socket_->close();
  md_socket_->close();
  if (ng_thread_.joinable()) ng_thread_.join();
  if (md_thread_.joinable()) md_thread_.join();
  ng_socket_.reset();
  md_socket_.reset();
  out_socket_.reset();
}

void ClientHandle::send(const proto::Endpoint& to, proto::Body body) {
  proto::Frame frame{record_.comp_id, next_seq_++, std::move(body)};
  out_socket_->send_to(proto::SocketAddress::resolve(to), proto::encode(frame));
}

void ClientHandle::ng_loop() {
  while (running_) {
    auto dg = ng_socket_->receive(Millis{200});
    if (!dg) continue;
    auto res = proto::decode(dg->bytes);
    if (!res) continue;
    std::lock_guard lk(mu_);
    std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, proto::LoginResponse>) {
            ng_login_.push_back(m.status);
          } else if constexpr (std::is_same_v<M, proto::LogoutResponse>) {
            ng_logout_.push_back(m.status);
          } else if constexpr (std::is_same_v<M, proto::OrderAck>) {
            if (m.status == proto::AckStatus::Expired || m.status == proto::AckStatus::StopElected)
              notices_.push_back(m);
            else
              acks_.push_back(m);
          } else if constexpr (std::is_same_v<M, proto::ExecutionReport>) {
            reports_.push_back(m);
          }
        },
        res.frame->body);
    cv_.notify_all();
  }
}

void ClientHandle::md_loop() {
  while (running_) {
    auto dg = md_socket_->receive(Millis{200});
    if (!dg) continue;
    auto res = proto::decode(dg->bytes);
    if (!res) continue;
    std::lock_guard lk(mu_);
    md_seq_.observe(res.frame->sequence);
    std::visit(
        [&](const auto& m) {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, proto::LoginResponse>) {
            md_login_.push_back(m.status);
          } else if constexpr (std::is_same_v<M, proto::LogoutResponse>) {
            md_logout_.push_back(m.status);
          } else if constexpr (std::is_same_v<M, proto::MarketDataUpdate>) {
            if (m.security_id != record_.security_id) return;
            update_ = m;
            session_ = m.session;
            ++updates_;
          } else if constexpr (std::is_same_v<M, proto::SessionChange>) {
            if (m.security_id == record_.security_id) session_ = m.session;
          }
        },
        res.frame->body);
    cv_.notify_all();
  }
}

proto::LoginStatus ClientHandle::await_status(bool md, bool logout) {
  auto& q = md ? (logout ? md_logout_ : md_login_) : (logout ? ng_logout_ : ng_login_);
  std::unique_lock lk(mu_);
  if (!cv_.wait_for(lk, options_.timeout, [&] { return !q.empty(); }))
    throw TimeoutError(std::string(md ? "market data" : "trading") + " gateway did not answer " +
                       (logout ? "logout" : "login"));
  auto s = q.front();
  q.pop_front();
  return s;
}

proto::LoginStatus ClientHandle::start() {
  open();
  send(record_.ng_input, proto::Login{record_.comp_id, record_.password});
  auto status = await_status(false, false);
  if (status != proto::LoginStatus::Ok) return status;
  send(record_.mdg_input, proto::Login{record_.comp_id, record_.password});
  auto md = await_status(true, false);
  if (md != proto::LoginStatus::Ok && md != proto::LoginStatus::AlreadyLoggedIn) {
    send(record_.ng_input, proto::Logout{});
    await_status(false, true);
    return md;
  }
  logged_in_ = true;
  return status;
}

proto::LoginStatus ClientHandle::end() {
  if (!logged_in_) return proto::LoginStatus::NotLoggedIn;
  send(record_.mdg_input, proto::Logout{});
  await_status(true, true);
  send(record_.ng_input, proto::Logout{});
  auto status = await_status(false, true);
  logged_in_ = false;
  close();
  return status;
}

SubmitResult ClientHandle::submit_order(std::int64_t volume, std::int64_t price, Side side, OrderType type,
                                        TimeInForce tif, std::int64_t display_qty, std::int64_t mes,
                                        std::int64_t stop_price, std::optional<Timestamp> expiry) {
  proto::NewOrder m;
  m.security_id = record_.security_id;
  m.side = side;
  m.order_type = type;
  m.tif = tif;
  m.price = price;
  m.qty = volume;
  m.display_qty = display_qty;
  m.mes = mes;
  m.stop_price = stop_price;
  m.expiry = expiry ? static_cast<std::uint64_t>(expiry->time_since_epoch().count()) : 0;
  return submit(m);
}

SubmitResult ClientHandle::submit(const proto::NewOrder& order) {
  if (!logged_in_) throw ClientError("not logged in");
  send(record_.ng_input, order);
  std::unique_lock lk(mu_);
  std::optional<proto::OrderAck> ack;
  auto found = [&] {
    for (auto it = acks_.begin(); it != acks_.end(); ++it) {
      if (it->status == proto::AckStatus::Accepted || it->status == proto::AckStatus::Rejected) {
        ack = *it;
        acks_.erase(it);
        return true;
      }
    }
    return false;
  };
  if (!cv_.wait_for(lk, options_.timeout, found)) throw TimeoutError("no acknowledgement for order");
  SubmitResult r;
  if (ack->status == proto::AckStatus::Accepted)
    r.order_id = ack->order_id;
  else
    r.reject = static_cast<RejectReason>(ack->reject_code);
  return r;
}

CancelResult ClientHandle::cancel_order(OrderId id, Side side) {
  if (!logged_in_) throw ClientError("not logged in");
  send(record_.ng_input, proto::CancelOrder{id, side});
  std::unique_lock lk(mu_);
  std::optional<proto::OrderAck> ack;
  auto found = [&] {
    for (auto it = acks_.begin(); it != acks_.end(); ++it) {
      if (it->order_id == id &&
          (it->status == proto::AckStatus::Cancelled || it->status == proto::AckStatus::CancelRejected)) {
        ack = *it;
        acks_.erase(it);
        return true;
      }
    }
    return false;
  };
  if (!cv_.wait_for(lk, options_.timeout, found)) throw TimeoutError("no answer to cancel");
  CancelResult r;
  r.cancelled = ack->status == proto::AckStatus::Cancelled;
  if (!r.cancelled) r.reject = static_cast<RejectReason>(ack->reject_code);
  return r;
}

std::optional<std::int64_t> ClientHandle::get_bid() const {
  std::lock_guard lk(mu_);
  if (!update_ || !(update_->flags & proto::kHasBid)) return std::nullopt;
  return update_->bid;
}

std::optional<std::int64_t> ClientHandle::get_bid_qty() const {
  std::lock_guard lk(mu_);
  if (!update_ || !(update_->flags & proto::kHasBid)) return std::nullopt;
  return update_->bid_qty;
}

std::optional<std::int64_t> ClientHandle::get_offer() const {
  std::lock_guard lk(mu_);
  if (!update_ || !(update_->flags & proto::kHasAsk)) return std::nullopt;
  return update_->ask;
}

std::optional<std::int64_t> ClientHandle::get_offer_qty() const {
  std::lock_guard lk(mu_);
  if (!update_ || !(update_->flags & proto::kHasAsk)) return std::nullopt;
  return update_->ask_qty;
}

std::optional<std::int64_t> ClientHandle::get_last_price() const {
  std::lock_guard lk(mu_);
  if (!update_ || !(update_->flags & proto::kHasLast)) return std::nullopt;
  return update_->last_price;
}

std::optional<SessionType> ClientHandle::session() const {
  std::lock_guard lk(mu_);
  return session_;
}

std::optional<std::int64_t> ClientHandle::calc_vwap(Side side, std::size_t k) const {
  std::vector<std::pair<std::int64_t, std::int64_t>> levels;
  {
    std::lock_guard lk(mu_);
    if (!update_) return std::nullopt;
    if (side == Side::Buy && (update_->flags & proto::kHasBid)) levels.emplace_back(update_->bid, update_->bid_qty);
    if (side == Side::Sell && (update_->flags & proto::kHasAsk)) levels.emplace_back(update_->ask, update_->ask_qty);
  }
  return hawkes::vwap(levels, k);
}

bool ClientHandle::is_auction() const {
  auto s = session();
  return s && is_auction_call(*s);
}

std::optional<proto::MarketDataUpdate> ClientHandle::last_update() const {
  std::lock_guard lk(mu_);
  return update_;
}

bool ClientHandle::wait_for_update(std::optional<Millis> timeout) {
  std::unique_lock lk(mu_);
  if (!cv_.wait_for(lk, timeout.value_or(options_.timeout), [&] { return consumed_ < updates_; })) return false;
  ++consumed_;
  return true;
}

std::uint64_t ClientHandle::updates_received() const {
  std::lock_guard lk(mu_);
  return updates_;
}

std::vector<proto::ExecutionReport> ClientHandle::take_reports() {
  std::lock_guard lk(mu_);
  return std::exchange(reports_, {});
}

std::vector<proto::OrderAck> ClientHandle::take_notices() {
  std::lock_guard lk(mu_);
  return std::exchange(notices_, {});
}

std::uint64_t ClientHandle::market_data_gaps() const {
  std::lock_guard lk(mu_);
  return md_seq_.gaps();
}

bool HandleFlowClient::submit(const hawkes::OrderSpec& o) {
  auto r = handle_.submit_order(o.qty, o.price, o.side, o.order_type, o.tif, o.qty, 0, 0);
  return r.accepted();
}

hawkes::BookView HandleFlowClient::view() const {
  hawkes::BookView v;
  if (auto u = handle_.last_update()) {
    if (u->flags & proto::kHasBid) v.bid = u->bid, v.bid_qty = u->bid_qty;
    if (u->flags & proto::kHasAsk) v.ask = u->ask, v.ask_qty = u->ask_qty;
  }
  return v;
}

bool HandleFlowClient::wait_for_update(std::chrono::milliseconds timeout) { return handle_.wait_for_update(timeout); }

}  // namespace matchbook::client

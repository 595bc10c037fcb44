#include "matchbook/gateways/market_data.hpp"

#include <spdlog/spdlog.h>

namespace matchbook::gw {

using nlohmann::json;

proto::MarketDataUpdate make_update(const SecurityState& s) {
  proto::MarketDataUpdate u;
  u.security_id = s.id();
  const auto& book = s.engine.book();
  Bbo bbo = book.bbo();
  if (bbo.bid) {
    u.flags |= proto::kHasBid;
    u.bid = bbo.bid->value;
    u.bid_qty = bbo.bid_qty ? bbo.bid_qty->value : 0;
  }
  if (bbo.ask) {
    u.flags |= proto::kHasAsk;
    u.ask = bbo.ask->value;
    u.ask_qty = bbo.ask_qty ? bbo.ask_qty->value : 0;
  }
  if (auto p = book.last_traded_price()) {
    u.flags |= proto::kHasLast;
    u.last_price = p->value;
    u.last_qty = book.last_traded_qty() ? book.last_traded_qty()->value : 0;
  }
  u.session = s.engine.session();
  return u;
}

json to_json(const MatchEvent& e) {
  return std::visit(
      [](const auto& ev) -> json {
        using E = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<E, Ack>) {
          return {{"type", "ack"}, {"order_id", ev.order_id}};
        } else if constexpr (std::is_same_v<E, Reject>) {
          return {{"type", "reject"}, {"order_id", ev.order_id}, {"reason", to_string(ev.reason)}};
        } else if constexpr (std::is_same_v<E, TradeEvent>) {
          return {{"type", "trade"},
                  {"trade_id", ev.trade.trade_id},
                  {"price", ev.trade.price.value},
                  {"qty", ev.trade.qty.value},
                  {"created", ev.trade.created_at.time_since_epoch().count()},
                  {"buy_order_id", ev.buy_order_id},
                  {"sell_order_id", ev.sell_order_id},
                  {"buy_leaves", ev.buy_leaves.value},
                  {"sell_leaves", ev.sell_leaves.value}};
        } else if constexpr (std::is_same_v<E, Expire>) {
          return {{"type", "expire"}, {"order_id", ev.order_id}, {"qty", ev.qty.value}};
        } else if constexpr (std::is_same_v<E, CancelAck>) {
          return {{"type", "cancel"}, {"order_id", ev.order_id}};
        } else {
          return {{"type", "stop_elected"}, {"order_id", ev.order_id}};
        }
      },
      e);
}

json to_json(const proto::MarketDataUpdate& u) {
  json j = {{"security_id", u.security_id}, {"session", to_string(u.session)}};
  j["bid"] = (u.flags & proto::kHasBid) ? json(u.bid) : json(nullptr);
  j["bid_qty"] = (u.flags & proto::kHasBid) ? json(u.bid_qty) : json(nullptr);
  j["ask"] = (u.flags & proto::kHasAsk) ? json(u.ask) : json(nullptr);
  j["ask_qty"] = (u.flags & proto::kHasAsk) ? json(u.ask_qty) : json(nullptr);
  j["last_price"] = (u.flags & proto::kHasLast) ? json(u.last_price) : json(nullptr);
  j["last_qty"] = (u.flags & proto::kHasLast) ? json(u.last_qty) : json(nullptr);
  return j;
}

json to_json(const BookSnapshot& s) {
  auto levels = [](const std::vector<LevelView>& v) {
    json a = json::array();
    for (const auto& l : v) a.push_back({{"price", l.price.value}, {"qty", l.total_qty.value}});
    return a;
  };
  json j = {{"security_id", s.security_id}, {"bids", levels(s.bids)}, {"asks", levels(s.asks)}};
  j["last_price"] = s.last_traded_price ? json(s.last_traded_price->value) : json(nullptr);
  j["last_qty"] = s.last_traded_qty ? json(s.last_traded_qty->value) : json(nullptr);
  return j;
}

bool changes_market(const EngineOutput& out) {
  if (!out.sessions.empty()) return true;
  for (const auto& e : out.events)
    if (!std::holds_alternative<Reject>(e)) return true;
  return false;
}

OutputListener journal_listener(EventStore& store) {
  return [&store](const OutputContext& ctx, const EngineOutput& out, const SecurityState& s) {
    Timestamp at = std::chrono::time_point_cast<Millis>(std::chrono::system_clock::now());
    for (const auto& e : out.events) {
      json payload = to_json(e);
      if (ctx.requester) payload["client_id"] = *ctx.requester;
      EventClass cls = std::holds_alternative<TradeEvent>(e) ? EventClass::Trade : EventClass::Order;
      store.append(cls, s.id(), at, std::move(payload));
    }
    for (SessionType st : out.sessions)
      store.append(EventClass::Session, s.id(), at, json{{"session", to_string(st)}});
  };
}

MarketDataGateway::MarketDataGateway(ClientRegistry& registry, FrameSender& sender, EventStore* store)
    : registry_(registry), sender_(sender), store_(store) {}

MarketDataGateway::~MarketDataGateway() { stop(); }

OutputListener MarketDataGateway::listener() {
  return [this](const OutputContext&, const EngineOutput& out, const SecurityState& s) {
    if (!changes_market(out)) return;
    Timestamp at = std::chrono::time_point_cast<Millis>(std::chrono::system_clock::now());
    for (SessionType st : out.sessions) publish_session(s.id(), st);
    publish(make_update(s), at);
  };
}

void MarketDataGateway::start() {
  std::set<std::pair<std::string, std::uint16_t>> seen;
  for (const auto& c : registry_.all()) {
    if (!seen.insert({c.mdg_input.host, c.mdg_input.port}).second) continue;
    listeners_.push_back(std::make_unique<UdpListener>(
        c.mdg_input, [this](const proto::Frame& f, const proto::SocketAddress&) { handle(f); }));
    spdlog::info("market data gateway listening on {}", c.mdg_input.url());
  }
}

void MarketDataGateway::stop() {
  for (auto& l : listeners_) l->stop();
  listeners_.clear();
}

std::vector<std::uint16_t> MarketDataGateway::bound_ports() const {
  std::vector<std::uint16_t> ports;
  for (const auto& l : listeners_) ports.push_back(l->port());
  return ports;
}

void MarketDataGateway::handle(const proto::Frame& frame) {
  auto rec = registry_.find(frame.client_id);
  if (!rec) return;  // nowhere to answer
  if (const auto* login = std::get_if<proto::Login>(&frame.body)) {
    proto::LoginStatus status = proto::LoginStatus::Ok;
    if (login->comp_id != rec->comp_id || login->password != rec->password) {
      status = proto::LoginStatus::InvalidCredentials;
    } else {
      std::lock_guard lk(mu_);
      if (!subscribers_.insert(rec->comp_id).second) status = proto::LoginStatus::AlreadyLoggedIn;
    }
    sender_.send(rec->mdg_output, rec->comp_id, proto::LoginResponse{status});
  } else if (std::holds_alternative<proto::Logout>(frame.body)) {
    bool was = false;
    {
      std::lock_guard lk(mu_);
      was = subscribers_.erase(rec->comp_id) != 0;
    }
    sender_.send(rec->mdg_output, rec->comp_id,
                 proto::LogoutResponse{was ? proto::LoginStatus::Ok : proto::LoginStatus::NotLoggedIn});
  }
}

void MarketDataGateway::publish(const proto::MarketDataUpdate& u, Timestamp at) {
  std::vector<ClientId> targets;
  {
    std::lock_guard lk(mu_);
    targets.assign(subscribers_.begin(), subscribers_.end());
  }
  for (ClientId id : targets) {
    auto rec = registry_.find(id);
    if (!rec || rec->security_id != u.security_id) continue;
    sender_.send(rec->mdg_output, id, u);
  }
  ++published_;
  if (store_) store_->append(EventClass::Snapshot, u.security_id, at, to_json(u));
}

void MarketDataGateway::publish_session(SecurityId security, SessionType session) {
  std::vector<ClientId> targets;
  {
    std::lock_guard lk(mu_);
    targets.assign(subscribers_.begin(), subscribers_.end());
  }
  for (ClientId id : targets) {
    auto rec = registry_.find(id);
    if (!rec || rec->security_id != security) continue;
    sender_.send(rec->mdg_output, id, proto::SessionChange{security, session});
  }
}

bool MarketDataGateway::subscribed(ClientId id) const {
  std::lock_guard lk(mu_);
  return subscribers_.count(id) != 0;
}

std::size_t MarketDataGateway::subscriber_count(SecurityId security) const {
  std::vector<ClientId> ids;
  {
    std::lock_guard lk(mu_);
    ids.assign(subscribers_.begin(), subscribers_.end());
  }
  std::size_t n = 0;
  for (ClientId id : ids)
    if (auto rec = registry_.find(id); rec && rec->security_id == security) ++n;
  return n;
}

}  // namespace matchbook::gw

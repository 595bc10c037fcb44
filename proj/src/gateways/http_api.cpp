#include "matchbook/gateways/http_api.hpp"

#include <spdlog/spdlog.h>

#include <fmt/format.h>

#include <charconv>
#include <sstream>

#include "httplib.h"
#include "matchbook/gateways/market_data.hpp"
#include "matchbook/perf/throughput.hpp"
#include "matchbook/protocol/codec.hpp"

namespace matchbook::gw {

using nlohmann::json;

namespace {

HttpResponse json_response(int status, const json& j) { return {status, j.dump(), "application/json"}; }
HttpResponse error(int status, std::string_view message) { return json_response(status, {{"error", message}}); }

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<json> parse_body(const std::string& body) {
  try {
    json j = json::parse(body);
    if (!j.is_object()) return std::nullopt;
    return j;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void flatten(const json& j, std::vector<double>& out) {
  if (j.is_array()) {
    for (const auto& x : j) flatten(x, out);
  } else if (j.is_number()) {
    out.push_back(j.get<double>());
  } else {
    throw hawkes::HawkesError("expected numbers");
  }
}

std::string joined(const json& j) {
  std::vector<double> v;
  flatten(j, v);
  std::string s;
  for (double x : v) {
    if (!s.empty()) s += ',';
    s += fmt::format("{}", x);
  }
  return s;
}

}  // namespace

json to_json(const ClientRecord& c, bool with_password) {
  json j = {{"compId", c.comp_id},
            {"ngInputUrl", c.ng_input.url()},
            {"ngInputStreamId", c.ng_input.stream_id},
            {"ngOutputUrl", c.ng_output.url()},
            {"ngOutputStreamId", c.ng_output.stream_id},
            {"mdgInputUrl", c.mdg_input.url()},
            {"mdgInputStreamId", c.mdg_input.stream_id},
            {"mdgOutputUrl", c.mdg_output.url()},
            {"mdgOutputStreamId", c.mdg_output.stream_id},
            {"securityId", c.security_id}};
  if (with_password) j["password"] = c.password;
  return j;
}

ClientRecord client_from_json(const json& j) {
  try {
    auto endpoint = [&](const char* url, const char* stream) {
      return proto::parse_endpoint(j.at(url).get<std::string>(), j.value(stream, 0));
    };
    ClientRecord c;
    c.comp_id = j.at("compId").get<ClientId>();
    c.password = j.at("password").get<std::string>();
    c.ng_input = endpoint("ngInputUrl", "ngInputStreamId");
    c.ng_output = endpoint("ngOutputUrl", "ngOutputStreamId");
    c.mdg_input = endpoint("mdgInputUrl", "mdgInputStreamId");
    c.mdg_output = endpoint("mdgOutputUrl", "mdgOutputStreamId");
    c.security_id = j.at("securityId").get<SecurityId>();
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(e.what());
  }
}

json to_json(const hawkes::HawkesParams& p) {
  const int d = p.dimension();
  json mu = json::array(), alpha = json::array(), beta = json::array();
  for (int i = 0; i < d; ++i) {
    mu.push_back(p.mu(i));
    json ar = json::array(), br = json::array();
    for (int k = 0; k < d; ++k) {
      ar.push_back(p.alpha(i, k));
      br.push_back(p.beta(i, k));
    }
    alpha.push_back(ar);
    beta.push_back(br);
  }
  return {{"dimension", d}, {"mu", mu}, {"alpha", alpha}, {"beta", beta}, {"spectralRadius", p.spectral_radius()}};
}

hawkes::HawkesParams hawkes_from_json(const json& j) {
  if (!j.is_object()) throw hawkes::HawkesError("expected an object");
  Properties props;
  for (const char* key : {"mu", "alpha", "beta"}) {
    if (!j.contains(key)) throw hawkes::HawkesError(std::string("missing ") + key);
    props.set(key, joined(j.at(key)));
  }
  if (j.contains("dimension")) {
    if (!j.at("dimension").is_number_integer()) throw hawkes::HawkesError("dimension must be an integer");
    props.set("dimension", std::to_string(j.at("dimension").get<int>()));
  }
  try {
    return hawkes::params_from_properties(props);
  } catch (const PropertiesError& e) {
    throw hawkes::HawkesError(e.what());
  }
}

HttpApi::HttpApi(Exchange& exchange, ClientRegistry& registry, TradingGateway& gateway, EventStore* store,
                 SimControl* sim)
    : exchange_(exchange), registry_(registry), gateway_(gateway), store_(store), sim_(sim) {}

HttpApi::~HttpApi() { stop(); }

std::optional<SecurityId> HttpApi::security_of(const std::string& id) const {
  auto v = parse_int(id);
  if (!v || *v < 0 || *v > std::numeric_limits<SecurityId>::max()) return std::nullopt;
  auto sid = static_cast<SecurityId>(*v);
  if (!exchange_.has_security(sid)) return std::nullopt;
  return sid;
}

HttpResponse HttpApi::get_securities() {
  json arr = json::array();
  for (SecurityId id : exchange_.securities()) {
    const auto& rec = exchange_.record(id);
    SessionType session = exchange_.query(id, [](const SecurityState& s) { return s.engine.session(); }).get();
    arr.push_back({{"securityId", id},
                   {"name", rec.name},
                   {"referencePrice", rec.config.reference_price ? json(rec.config.reference_price->value) : json()},
                   {"circuitBreakerPct", rec.config.circuit_breaker_pct},
                   {"minReserveSize", rec.config.min_reserve_size.value},
                   {"session", to_string(session)}});
  }
  return json_response(200, arr);
}

HttpResponse HttpApi::get_lob(const std::string& id, const std::string& depth_text) {
  auto sid = security_of(id);
  if (!sid) return error(404, "unknown security");
  int depth = 10;
  if (!depth_text.empty()) {
    auto d = parse_int(depth_text);
    if (!d || *d < 1 || *d > 100000) return error(400, "depth must be a positive integer");
    depth = static_cast<int>(*d);
  }
  json j = exchange_
               .query(*sid,
                      [depth](const SecurityState& s) {
                        json out = to_json(s.engine.book().snapshot(depth));
                        out["session"] = to_string(s.engine.session());
                        return out;
                      })
               .get();
  return json_response(200, j);
}

HttpResponse HttpApi::get_trades(const std::string& id, bool csv) {
  auto sid = security_of(id);
  if (!sid) return error(404, "unknown security");
  auto rows = exchange_.query(*sid, [](const SecurityState& s) { return s.trades; }).get();
  if (csv) {
    std::ostringstream out;
    perf::write_trades(out, rows);
    return {200, out.str(), "text/csv"};
  }
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"tradeId", r.trade_id}, {"price", r.price}, {"quantity", r.quantity},
                   {"creationTime", perf::format_utc(r.created)}});
  return json_response(200, arr);
}

HttpResponse HttpApi::get_orders(const std::string& id, bool csv) {
  auto sid = security_of(id);
  if (!sid) return error(404, "unknown security");
  auto rows = exchange_.query(*sid, [](const SecurityState& s) { return s.limit_orders; }).get();
  if (csv) {
    std::ostringstream out;
    perf::write_limit_orders(out, rows);
    return {200, out.str(), "text/csv"};
  }
  json arr = json::array();
  for (const auto& r : rows)
    arr.push_back({{"securityId", r.security_id}, {"orderId", r.order_id},
                   {"submittedTime", perf::format_utc(r.submitted)}, {"price", r.price}, {"volume", r.volume},
                   {"side", to_string(r.side)}});
  return json_response(200, arr);
}

HttpResponse HttpApi::get_clients() {
  json arr = json::array();
  for (const auto& c : registry_.all()) {
    json j = to_json(c, false);
    j["loggedIn"] = gateway_.logged_in(c.comp_id);
    arr.push_back(j);
  }
  return json_response(200, arr);
}

HttpResponse HttpApi::get_status() {
  json secs = json::array();
  for (SecurityId id : exchange_.securities()) {
    secs.push_back(exchange_
                       .query(id,
                              [](const SecurityState& s) {
                                json j = {{"securityId", s.id()},
                                          {"session", to_string(s.engine.session())},
                                          {"submitted", s.submitted},
                                          {"accepted", s.accepted},
                                          {"rejected", s.rejected},
                                          {"trades", s.trades.size()}};
                                if (s.latency.total_count() > 0) {
                                  j["latencyNs"] = {{"p50", s.latency.percentile(50)},
                                                    {"p99", s.latency.percentile(99)},
                                                    {"max", s.latency.max()}};
                                }
                                if (s.first_order && *s.last_order > *s.first_order) {
                                  perf::RunStats run{*s.first_order, *s.last_order, s.submitted};
                                  j["throughput"] = perf::throughput(run);
                                }
                                return j;
                              })
                       .get());
  }
  json j = {{"securities", secs}, {"loggedIn", gateway_.logged_in_count()}};
  if (store_) {
    auto st = store_->stats();
    j["eventStore"] = {{"appended", st.appended}, {"written", st.written}, {"droppedSnapshots", st.dropped_snapshots},
                       {"queued", st.queued}};
  }
  if (sim_) j["simulation"] = sim_->status();
  return json_response(200, j);
}

HttpResponse HttpApi::post_session(const std::string& id, const std::string& body) {
  auto sid = security_of(id);
  if (!sid) return error(404, "unknown security");
  auto j = parse_body(body);
  if (!j || !j->contains("session") || !(*j)["session"].is_string()) return error(400, "expected {\"session\": name}");
  auto target = parse_session((*j)["session"].get<std::string>());
  if (!target) return error(400, "unknown session");
  // Goes through the same AdminCommand frame path as the wire.
  proto::Frame frame{*sid, 0, proto::AdminCommand{*target}};
  auto decoded = proto::decode(proto::encode(frame));
  if (!decoded) return error(400, "cannot encode admin command");
  AdminResult r = gateway_.admin(*decoded.frame).get();
  if (r.error) return error(409, to_string(*r.error));
  SessionType now = exchange_.query(*sid, [](const SecurityState& s) { return s.engine.session(); }).get();
  return json_response(200, {{"securityId", *sid}, {"session", to_string(now)}});
}

HttpResponse HttpApi::post_sim(const std::string& action, const std::string& body) {
  if (!sim_) return error(503, "no simulator attached");
  auto j = body.empty() ? std::optional<json>(json::object()) : parse_body(body);
  if (!j) return error(400, "malformed body");
  try {
    auto ids = [&]() -> std::pair<ClientId, SecurityId> {
      if (!j->contains("clientId") || !j->contains("securityId"))
        throw std::invalid_argument("expected clientId and securityId");
      return {j->at("clientId").get<ClientId>(), j->at("securityId").get<SecurityId>()};
    };
    if (action == "start") {
      auto [c, s] = ids();
      if (!exchange_.has_security(s)) return error(404, "unknown security");
      sim_->start(c, s);
    } else if (action == "warmup") {
      auto [c, s] = ids();
      if (!exchange_.has_security(s)) return error(404, "unknown security");
      sim_->warmup(c, s);
    } else if (action == "stop") {
      std::optional<ClientId> c;
      if (j->contains("clientId")) c = j->at("clientId").get<ClientId>();
      sim_->stop(c);
    } else {
      return error(404, "unknown action");
    }
  } catch (const SimError& e) {
    return error(409, e.what());
  } catch (const json::exception& e) {
    return error(400, e.what());
  } catch (const std::invalid_argument& e) {
    return error(400, e.what());
  }
  return json_response(200, sim_->status());
}

HttpResponse HttpApi::post_clients(const std::string& body) {
  auto j = parse_body(body);
  if (!j || !j->contains("op") || !(*j)["op"].is_string()) return error(400, "expected {\"op\": ...}");
  std::string op = (*j)["op"].get<std::string>();
  try {
    if (op == "create" || op == "update") {
      if (!j->contains("client")) return error(400, "missing client");
      ClientRecord c = client_from_json((*j)["client"]);
      if (op == "update" && !registry_.find(c.comp_id)) return error(404, "unknown client");
      op == "create" ? registry_.add(c) : registry_.update(c);
      return json_response(200, to_json(c, false));
    }
    if (op == "delete") {
      if (!j->contains("compId")) return error(400, "missing compId");
      auto id = (*j)["compId"].get<ClientId>();
      if (!registry_.find(id)) return error(404, "unknown client");
      registry_.remove(id);
      return json_response(200, {{"deleted", id}});
    }
  } catch (const RegistryError& e) {
    return error(400, e.what());
  } catch (const std::invalid_argument& e) {
    return error(400, e.what());
  } catch (const json::exception& e) {
    return error(400, e.what());
  }
  return error(400, "op must be create, update or delete");
}

HttpResponse HttpApi::get_hawkes() {
  if (!sim_) return error(503, "no simulator attached");
  return json_response(200, to_json(sim_->params()));
}

HttpResponse HttpApi::post_hawkes(const std::string& body) {
  if (!sim_) return error(503, "no simulator attached");
  auto j = parse_body(body);
  if (!j) return error(400, "malformed body");
  try {
    auto p = hawkes_from_json(*j);
    sim_->set_params(p);
    return json_response(200, to_json(p));
  } catch (const hawkes::HawkesError& e) {
    return error(400, e.what());
  } catch (const SimError& e) {
    return error(409, e.what());
  }
}

int HttpApi::start(const std::string& host, int port) {
  if (server_) throw std::logic_error("already serving");
  server_ = std::make_unique<httplib::Server>();
  auto& srv = *server_;
  auto send = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, r.content_type.c_str());
  };
  auto csv = [](const httplib::Request& req) { return req.has_param("format") && req.get_param_value("format") == "csv"; };

  srv.Get("/securities", [=, this](const httplib::Request&, httplib::Response& res) { send(res, get_securities()); });
  srv.Get(R"(/lob/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
    send(res, get_lob(req.matches[1], req.has_param("depth") ? req.get_param_value("depth") : ""));
  });
  srv.Get(R"(/trades/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
    send(res, get_trades(req.matches[1], csv(req)));
  });
  srv.Get(R"(/orders/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
    send(res, get_orders(req.matches[1], csv(req)));
  });
  srv.Get("/clients", [=, this](const httplib::Request&, httplib::Response& res) { send(res, get_clients()); });
  srv.Get("/status", [=, this](const httplib::Request&, httplib::Response& res) { send(res, get_status()); });
  srv.Get("/hawkes", [=, this](const httplib::Request&, httplib::Response& res) { send(res, get_hawkes()); });
  srv.Post(R"(/session/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
    send(res, post_session(req.matches[1], req.body));
  });
  srv.Post(R"(/sim/([a-z]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
    send(res, post_sim(req.matches[1], req.body));
  });
  srv.Post("/clients", [=, this](const httplib::Request& req, httplib::Response& res) { send(res, post_clients(req.body)); });
  srv.Post("/hawkes", [=, this](const httplib::Request& req, httplib::Response& res) { send(res, post_hawkes(req.body)); });
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    res.status = 500;
    res.set_content(json{{"error", what}}.dump(), "application/json");
  });

  int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    server_.reset();
    throw std::runtime_error(fmt::format("cannot bind http {}:{}", host, port));
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  spdlog::info("http api on {}:{}", host, bound);
  return bound;
}

void HttpApi::stop() {
  if (!server_) return;
  server_->stop();
  if (thread_.joinable()) thread_.join();
  server_.reset();
}

}  // namespace matchbook::gw

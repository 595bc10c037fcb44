#include "matchbook/gateways/registry.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "matchbook/core/properties.hpp"

namespace matchbook::gw {
namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RegistryError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Int>
Int number(std::string_view s, std::string_view what) {
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) {
    throw std::invalid_argument(fmt::format("bad {} '{}'", what, s));
  }
  return v;
}

std::vector<std::string> fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

// Calls fn(fields, line_no) for every data line after a header check that
// ignores spaces after commas (the published header has one).
template <typename Fn>
void each_row(std::string_view text, std::string_view header, Fn fn) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (!seen_header) {
      if (fields(line) != fields(header)) throw RegistryError(fmt::format("line {}: unexpected header", n));
      seen_header = true;
      continue;
    }
    try {
      fn(fields(line));
    } catch (const std::invalid_argument& e) {
      throw RegistryError(fmt::format("line {}: {}", n, e.what()));
    }
  }
  if (!seen_header) throw RegistryError("missing header");
}

}  // namespace

std::vector<ClientRecord> parse_client_data(std::string_view text) {
  std::vector<ClientRecord> out;
  std::set<ClientId> ids;
  each_row(text, kClientDataHeader, [&](const std::vector<std::string>& f) {
    if (f.size() != 11) throw std::invalid_argument(fmt::format("expected 11 fields, got {}", f.size()));
    ClientRecord r;
    r.comp_id = number<ClientId>(f[0], "CompID");
    r.password = f[1];
    r.ng_input = proto::parse_endpoint(f[2], number<std::int32_t>(f[3], "stream id"));
    r.ng_output = proto::parse_endpoint(f[4], number<std::int32_t>(f[5], "stream id"));
    r.mdg_input = proto::parse_endpoint(f[6], number<std::int32_t>(f[7], "stream id"));
    r.mdg_output = proto::parse_endpoint(f[8], number<std::int32_t>(f[9], "stream id"));
    r.security_id = number<SecurityId>(f[10], "SecurityId");
    if (!ids.insert(r.comp_id).second) throw std::invalid_argument(fmt::format("duplicate CompID {}", r.comp_id));
    out.push_back(std::move(r));
  });
  return out;
}

std::string format_client_data(const std::vector<ClientRecord>& clients) {
  std::string out(kClientDataHeader);
  out += '\n';
  for (const auto& c : clients) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", c.comp_id, c.password, c.ng_input.url(),
                       c.ng_input.stream_id, c.ng_output.url(), c.ng_output.stream_id, c.mdg_input.url(),
                       c.mdg_input.stream_id, c.mdg_output.url(), c.mdg_output.stream_id, c.security_id);
  }
  return out;
}

ClientRegistry::ClientRegistry(std::vector<ClientRecord> clients, std::optional<std::filesystem::path> path)
    : path_(std::move(path)) {
  for (auto& c : clients) {
    validate(c);
    const auto id = c.comp_id;
    if (!clients_.emplace(id, std::move(c)).second) throw RegistryError(fmt::format("duplicate CompID {}", id));
  }
}

ClientRegistry ClientRegistry::load(const std::filesystem::path& path) {
  return ClientRegistry(parse_client_data(read_file(path)), path);
}

std::optional<ClientRecord> ClientRegistry::find(ClientId id) const {
  std::lock_guard lock(mu_);
  const auto it = clients_.find(id);
  if (it == clients_.end()) return std::nullopt;
  return it->second;
}

std::vector<ClientRecord> ClientRegistry::all() const {
  std::lock_guard lock(mu_);
  std::vector<ClientRecord> out;
  for (const auto& [_, c] : clients_) out.push_back(c);
  return out;
}

void ClientRegistry::validate(const ClientRecord& r) const {
  if (r.comp_id == 0) throw RegistryError("CompID must be positive");
  if (r.password.empty() || r.password.size() > 12) throw RegistryError("password must be 1 to 12 characters");
  for (char c : r.password) {
    if (c <= 0x20 || c > 0x7e || c == ',') throw RegistryError("password must be printable ASCII without spaces or commas");
  }
  if (r.security_id == 0) throw RegistryError("SecurityId must be positive");
}

void ClientRegistry::add(ClientRecord record) {
  validate(record);
  std::lock_guard lock(mu_);
  const auto id = record.comp_id;
  if (!clients_.emplace(id, std::move(record)).second) throw RegistryError(fmt::format("duplicate CompID {}", id));
  save_locked();
}

void ClientRegistry::update(ClientRecord record) {
  validate(record);
  std::lock_guard lock(mu_);
  const auto it = clients_.find(record.comp_id);
  if (it == clients_.end()) throw RegistryError(fmt::format("unknown CompID {}", record.comp_id));
  it->second = std::move(record);
  save_locked();
}

void ClientRegistry::remove(ClientId id) {
  std::lock_guard lock(mu_);
  if (clients_.erase(id) == 0) throw RegistryError(fmt::format("unknown CompID {}", id));
  save_locked();
}

void ClientRegistry::save_locked() const {
  if (!path_) return;
  std::vector<ClientRecord> list;
  for (const auto& [_, c] : clients_) list.push_back(c);
  std::ofstream out(*path_, std::ios::binary);
  out << format_client_data(list);
  if (!out) throw RegistryError("cannot write " + path_->string());
}

std::vector<SecurityRecord> parse_stocks(std::string_view text) {
  std::vector<SecurityRecord> out;
  std::set<SecurityId> ids;
  each_row(text, kStockHeader, [&](const std::vector<std::string>& f) {
    if (f.size() != 5) throw std::invalid_argument(fmt::format("expected 5 fields, got {}", f.size()));
    SecurityRecord s;
    s.config.security_id = number<SecurityId>(f[0], "SecurityId");
    if (s.config.security_id == 0) throw std::invalid_argument("SecurityId must be positive");
    s.name = f[1];
    if (!f[2].empty()) s.config.reference_price = Price{number<std::int64_t>(f[2], "ReferencePrice")};
    try {
      std::size_t used = 0;
      s.config.circuit_breaker_pct = std::stod(f[3], &used);
      if (used != f[3].size() || !(s.config.circuit_breaker_pct > 0)) throw std::invalid_argument(f[3]);
    } catch (const std::exception&) {
      throw std::invalid_argument(fmt::format("bad CircuitBreakerPct '{}'", f[3]));
    }
    s.config.min_reserve_size = Qty{number<std::int64_t>(f[4], "MinReserveSize")};
    if (!ids.insert(s.config.security_id).second) {
      throw std::invalid_argument(fmt::format("duplicate SecurityId {}", s.config.security_id));
    }
    out.push_back(std::move(s));
  });
  return out;
}

std::vector<SecurityRecord> load_stocks(const std::filesystem::path& path) { return parse_stocks(read_file(path)); }

}  // namespace matchbook::gw

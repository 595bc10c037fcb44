#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "matchbook/core/order.hpp"
#include "matchbook/protocol/transport.hpp"

namespace matchbook::gw {

class RegistryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kClientDataHeader =
    "CompID,Password,NGInputURL,NGInputStreamId,NGOutputURL,NGOutputStreamId,MDGInputURL,MDGInputStreamId,"
    "MDGOutputURL, MDGOutputStreamId,SecurityId";

struct ClientRecord {
  ClientId comp_id{0};
  std::string password;
  proto::Endpoint ng_input;    // the trading gateway listens here
  proto::Endpoint ng_output;   // the client listens here for replies
  proto::Endpoint mdg_input;   // the market-data gateway listens here
  proto::Endpoint mdg_output;  // the client listens here for updates
  SecurityId security_id{0};
  friend bool operator==(const ClientRecord&, const ClientRecord&) = default;
};

// Throws RegistryError naming the line.
std::vector<ClientRecord> parse_client_data(std::string_view text);
std::string format_client_data(const std::vector<ClientRecord>& clients);

// Thread-safe view of ClientData.csv. Changes are written back when a path
// is attached; running gateways keep the endpoints they bound at start.
class ClientRegistry {
 public:
  ClientRegistry() = default;
  // With a path, every change is written back to it.
  explicit ClientRegistry(std::vector<ClientRecord> clients, std::optional<std::filesystem::path> path = {});
  static ClientRegistry load(const std::filesystem::path& path);

  std::optional<ClientRecord> find(ClientId id) const;
  std::vector<ClientRecord> all() const;

  // Throw RegistryError on a duplicate id (add), a missing one
  // (update/remove), an empty or over-long password, or a zero security.
  void add(ClientRecord record);
  void update(ClientRecord record);
  void remove(ClientId id);

 private:
  void validate(const ClientRecord& r) const;
  void save_locked() const;

  mutable std::mutex mu_;
  std::map<ClientId, ClientRecord> clients_;
  std::optional<std::filesystem::path> path_;
};

inline constexpr std::string_view kStockHeader = "SecurityId,Name,ReferencePrice,CircuitBreakerPct,MinReserveSize";

struct SecurityRecord {
  SecurityConfig config;
  std::string name;
  friend bool operator==(const SecurityRecord& a, const SecurityRecord& b) {
    return a.name == b.name && a.config.security_id == b.config.security_id &&
           a.config.reference_price == b.config.reference_price &&
           a.config.circuit_breaker_pct == b.config.circuit_breaker_pct &&
           a.config.min_reserve_size == b.config.min_reserve_size;
  }
};

// Stock.csv; ReferencePrice may be empty.
std::vector<SecurityRecord> parse_stocks(std::string_view text);
std::vector<SecurityRecord> load_stocks(const std::filesystem::path& path);

}  // namespace matchbook::gw

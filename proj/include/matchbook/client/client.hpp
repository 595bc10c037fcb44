#pragma once

#include <chrono>
#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "matchbook/gateways/registry.hpp"
#include "matchbook/hawkes/flow.hpp"
#include "matchbook/protocol/messages.hpp"
#include "matchbook/protocol/transport.hpp"

namespace matchbook::client {

class ClientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeoutError : public ClientError {
 public:
  using ClientError::ClientError;
};

struct ClientOptions {
  Millis timeout{5000};
};

struct SubmitResult {
  std::optional<OrderId> order_id;
  std::optional<RejectReason> reject;
  bool accepted() const { return order_id.has_value(); }
};

struct CancelResult {
  bool cancelled{false};
  std::optional<RejectReason> reject;
};

// One client trading one security, over the gateways' UDP endpoints. Use
// from one thread at a time; the receive threads only fill the caches below.
class ClientHandle {
 public:
  explicit ClientHandle(gw::ClientRecord record, ClientOptions options = {});
  ~ClientHandle();
  ClientHandle(const ClientHandle&) = delete;
  ClientHandle& operator=(const ClientHandle&) = delete;

  // Logs in to the trading gateway, then subscribes to market data. Returns
  // the trading gateway's status; throws TimeoutError without a reply.
  proto::LoginStatus start();
  // Unsubscribes, logs out and closes the sockets. NotLoggedIn without a
  // prior start().
  proto::LoginStatus end();
  bool logged_in() const { return logged_in_; }

  // Blocks until the order is accepted or rejected. Throws ClientError when
  // not logged in and TimeoutError without an answer.
  SubmitResult submit_order(std::int64_t volume, std::int64_t price, Side side, OrderType type, TimeInForce tif,
                            std::int64_t display_qty, std::int64_t mes, std::int64_t stop_price,
                            std::optional<Timestamp> expiry = std::nullopt);
  SubmitResult submit(const proto::NewOrder& order);
  CancelResult cancel_order(OrderId id, Side side);

  // Reads of the last MarketDataUpdate; absent before the first one.
  std::optional<std::int64_t> get_bid() const;
  std::optional<std::int64_t> get_bid_qty() const;
  std::optional<std::int64_t> get_offer() const;
  std::optional<std::int64_t> get_offer_qty() const;
  std::optional<std::int64_t> get_last_price() const;
  std::optional<SessionType> session() const;
  // Updates carry level 1 only, so k = 1 is all there is to average over.
  std::optional<std::int64_t> calc_vwap(Side side, std::size_t k = 1) const;
  bool is_auction() const;
  std::optional<proto::MarketDataUpdate> last_update() const;

  // Consumes one received update, waiting up to timeout for one to arrive.
  bool wait_for_update(std::optional<Millis> timeout = std::nullopt);
  std::uint64_t updates_received() const;

  // Reports and unsolicited acks (expiry, elected stops) received so far.
  std::vector<proto::ExecutionReport> take_reports();
  std::vector<proto::OrderAck> take_notices();

  std::uint64_t market_data_gaps() const;
  const gw::ClientRecord& record() const { return record_; }

 private:
  void open();
  void close();
  void ng_loop();
  void md_loop();
  void send(const proto::Endpoint& to, proto::Body body);
  proto::LoginStatus await_status(bool md, bool logout);

  gw::ClientRecord record_;
  ClientOptions options_;
  std::optional<proto::UdpSocket> ng_socket_;
  std::optional<proto::UdpSocket> md_socket_;
  std::optional<proto::UdpSocket> out_socket_;
  std::uint64_t next_seq_{1};
  bool logged_in_{false};

  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<proto::LoginStatus> ng_login_, ng_logout_, md_login_, md_logout_;
  std::deque<proto::OrderAck> acks_;
  std::vector<proto::OrderAck> notices_;
  std::vector<proto::ExecutionReport> reports_;
  std::optional<proto::MarketDataUpdate> update_;
  std::optional<SessionType> session_;
  std::uint64_t updates_{0};
  std::uint64_t consumed_{0};
  proto::SequenceTracker md_seq_;
  std::atomic<bool> running_{false};
  std::thread ng_thread_, md_thread_;
};

// Drives a ClientHandle from the Hawkes flow generator.
class HandleFlowClient final : public hawkes::FlowClient {
 public:
  explicit HandleFlowClient(ClientHandle& handle) : handle_(handle) {}
  bool submit(const hawkes::OrderSpec& order) override;
  hawkes::BookView view() const override;
  bool wait_for_update(std::chrono::milliseconds timeout) override;

 private:
  ClientHandle& handle_;
};

}  // namespace matchbook::client

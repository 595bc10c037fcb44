#include "matchbook/protocol/codec.hpp"

#include <string>

namespace matchbook::proto {
namespace {

class Writer {
 public:
  explicit Writer(std::uint8_t* p) : p_(p) {}
  void u8(std::uint8_t v) { *p_++ = v; }
  void u16(std::uint16_t v) { put(v, 2); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void i64(std::int64_t v) { put(static_cast<std::uint64_t>(v), 8); }
  void bytes(const char* s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) *p_++ = static_cast<std::uint8_t>(s[i]);
  }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) *p_++ = static_cast<std::uint8_t>(v >> (8 * i));
  }
  std::uint8_t* p_;
};

class Reader {
 public:
  explicit Reader(const std::uint8_t* p) : p_(p) {}
  std::uint8_t u8() { return *p_++; }
  std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(get(8)); }
  const std::uint8_t* skip(std::size_t n) {
    const auto* at = p_;
    p_ += n;
    return at;
  }

 private:
  std::uint64_t get(int n) {
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(*p_++) << (8 * i);
    return v;
  }
  const std::uint8_t* p_;
};

void require(bool ok, const char* what) {
  if (!ok) throw EncodeError(std::string("encode: ") + what);
}

bool valid_reject_code(std::uint8_t c) { return c == 0 || (c >= 1 && c <= 12); }

bool valid_password(const std::string& pw) {
  if (pw.size() > kPasswordSize) return false;
  for (char c : pw) {
    if (c < 0x20 || c > 0x7e) return false;
  }
  return pw.empty() || pw.back() != ' ';
}

struct BodyWriter {
  Writer& w;

  void operator()(const NewOrder& m) {
    require(m.price >= 0 && m.qty >= 0 && m.display_qty >= 0 && m.mes >= 0 && m.stop_price >= 0,
            "NewOrder fields must be non-negative");
    require(side_from_byte(static_cast<std::uint8_t>(m.side)) &&
                order_type_from_byte(static_cast<std::uint8_t>(m.order_type)) &&
                tif_from_byte(static_cast<std::uint8_t>(m.tif)),
            "NewOrder enum out of range");
    w.u32(m.security_id);
    w.u8(static_cast<std::uint8_t>(m.side));
    w.u8(static_cast<std::uint8_t>(m.order_type));
    w.u8(static_cast<std::uint8_t>(m.tif));
    w.i64(m.price);
    w.i64(m.qty);
    w.i64(m.display_qty);
    w.i64(m.mes);
    w.i64(m.stop_price);
    w.u64(m.expiry);
  }
  void operator()(const OrderAck& m) {
    require(valid_reject_code(m.reject_code) && m.status <= AckStatus::StopElected, "OrderAck status");
    w.u64(m.order_id);
    w.u8(static_cast<std::uint8_t>(m.status));
    w.u8(m.reject_code);
  }
  void operator()(const ExecutionReport& m) {
    require(m.price >= 0 && m.qty >= 0 && m.leaves_qty >= 0, "ExecutionReport fields must be non-negative");
    w.u64(m.order_id);
    w.u64(m.trade_id);
    w.i64(m.price);
    w.i64(m.qty);
    w.i64(m.leaves_qty);
  }
  void operator()(const CancelOrder& m) {
    require(side_from_byte(static_cast<std::uint8_t>(m.side)).has_value(), "CancelOrder side");
    w.u64(m.order_id);
    w.u8(static_cast<std::uint8_t>(m.side));
  }
  void operator()(const Login& m) {
    require(valid_password(m.password), "password must be at most 12 printable ASCII characters");
    w.u32(m.comp_id);
    std::string padded = m.password;
    padded.resize(kPasswordSize, ' ');
    w.bytes(padded.data(), kPasswordSize);
  }
  void operator()(const LoginResponse& m) { status(m.status); }
  void operator()(const Logout&) {}
  void operator()(const LogoutResponse& m) { status(m.status); }
  void status(LoginStatus s) {
    require(s <= LoginStatus::NotLoggedIn, "login status");
    w.u8(static_cast<std::uint8_t>(s));
  }
  void session(SessionType s) {
    require(session_from_byte(static_cast<std::uint8_t>(s)).has_value(), "session out of range");
    w.u8(static_cast<std::uint8_t>(s));
  }
  void operator()(const MarketDataUpdate& m) {
    require(m.bid >= 0 && m.bid_qty >= 0 && m.ask >= 0 && m.ask_qty >= 0 && m.last_price >= 0 && m.last_qty >= 0,
            "MarketDataUpdate fields must be non-negative");
    require((m.flags & ~kKnownFlags) == 0, "MarketDataUpdate flags");
    w.u32(m.security_id);
    w.i64(m.bid);
    w.i64(m.bid_qty);
    w.i64(m.ask);
    w.i64(m.ask_qty);
    w.i64(m.last_price);
    w.i64(m.last_qty);
    session(m.session);
    w.u8(m.flags);
  }
  void operator()(const SessionChange& m) {
    w.u32(m.security_id);
    session(m.session);
  }
  void operator()(const AdminCommand& m) { session(m.command); }
};

std::optional<Body> read_body(TemplateId id, Reader& r) {
  switch (id) {
    case TemplateId::NewOrder: {
      NewOrder m;
      m.security_id = r.u32();
      const auto side = side_from_byte(r.u8());
      const auto type = order_type_from_byte(r.u8());
      const auto tif = tif_from_byte(r.u8());
      if (!side || !type || !tif) return std::nullopt;
      m.side = *side;
      m.order_type = *type;
      m.tif = *tif;
      m.price = r.i64();
      m.qty = r.i64();
      m.display_qty = r.i64();
      m.mes = r.i64();
      m.stop_price = r.i64();
      m.expiry = r.u64();
      if (m.price < 0 || m.qty < 0 || m.display_qty < 0 || m.mes < 0 || m.stop_price < 0) return std::nullopt;
      return m;
    }
    case TemplateId::OrderAck: {
      OrderAck m;
      m.order_id = r.u64();
      const auto status = r.u8();
      m.reject_code = r.u8();
      if (status > static_cast<std::uint8_t>(AckStatus::StopElected) || !valid_reject_code(m.reject_code)) {
        return std::nullopt;
      }
      m.status = static_cast<AckStatus>(status);
      return m;
    }
    case TemplateId::ExecutionReport: {
      ExecutionReport m;
      m.order_id = r.u64();
      m.trade_id = r.u64();
      m.price = r.i64();
      m.qty = r.i64();
      m.leaves_qty = r.i64();
      if (m.price < 0 || m.qty < 0 || m.leaves_qty < 0) return std::nullopt;
      return m;
    }
    case TemplateId::CancelOrder: {
      CancelOrder m;
      m.order_id = r.u64();
      const auto side = side_from_byte(r.u8());
      if (!side) return std::nullopt;
      m.side = *side;
      return m;
    }
    case TemplateId::Login: {
      Login m;
      m.comp_id = r.u32();
      const auto* p = r.skip(kPasswordSize);
      std::string pw(reinterpret_cast<const char*>(p), kPasswordSize);
      while (!pw.empty() && pw.back() == ' ') pw.pop_back();
      if (!valid_password(pw)) return std::nullopt;
      m.password = std::move(pw);
      return m;
    }
    case TemplateId::LoginResponse:
    case TemplateId::LogoutResponse: {
      const auto s = r.u8();
      if (s > static_cast<std::uint8_t>(LoginStatus::NotLoggedIn)) return std::nullopt;
      if (id == TemplateId::LoginResponse) return LoginResponse{static_cast<LoginStatus>(s)};
      return LogoutResponse{static_cast<LoginStatus>(s)};
    }
    case TemplateId::Logout:
      return Logout{};
    case TemplateId::MarketDataUpdate: {
      MarketDataUpdate m;
      m.security_id = r.u32();
      m.bid = r.i64();
      m.bid_qty = r.i64();
      m.ask = r.i64();
      m.ask_qty = r.i64();
      m.last_price = r.i64();
      m.last_qty = r.i64();
      const auto session = session_from_byte(r.u8());
      m.flags = r.u8();
      if (!session || (m.flags & ~kKnownFlags) != 0) return std::nullopt;
      if (m.bid < 0 || m.bid_qty < 0 || m.ask < 0 || m.ask_qty < 0 || m.last_price < 0 || m.last_qty < 0) {
        return std::nullopt;
      }
      m.session = *session;
      return m;
    }
    case TemplateId::SessionChange: {
      SessionChange m;
      m.security_id = r.u32();
      const auto session = session_from_byte(r.u8());
      if (!session) return std::nullopt;
      m.session = *session;
      return m;
    }
    case TemplateId::AdminCommand: {
      const auto session = session_from_byte(r.u8());
      if (!session) return std::nullopt;
      return AdminCommand{*session};
    }
  }
  return std::nullopt;
}

}  // namespace

TemplateId template_of(const Body& body) {
  static constexpr TemplateId kByIndex[] = {
      TemplateId::NewOrder,       TemplateId::OrderAck,         TemplateId::ExecutionReport,
      TemplateId::CancelOrder,    TemplateId::Login,            TemplateId::LoginResponse,
      TemplateId::Logout,         TemplateId::LogoutResponse,   TemplateId::MarketDataUpdate,
      TemplateId::SessionChange,  TemplateId::AdminCommand,
  };
  return kByIndex[body.index()];
}

std::size_t body_size(TemplateId id) {
  switch (id) {
    case TemplateId::NewOrder:
      return 4 + 3 + 6 * 8;
    case TemplateId::OrderAck:
      return 8 + 1 + 1;
    case TemplateId::ExecutionReport:
      return 5 * 8;
    case TemplateId::CancelOrder:
      return 8 + 1;
    case TemplateId::Login:
      return 4 + kPasswordSize;
    case TemplateId::LoginResponse:
    case TemplateId::LogoutResponse:
      return 1;
    case TemplateId::Logout:
      return 0;
    case TemplateId::MarketDataUpdate:
      return 4 + 6 * 8 + 2;
    case TemplateId::SessionChange:
      return 4 + 1;
    case TemplateId::AdminCommand:
      return 1;
  }
  return 0;
}

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::NewOrder:
      return "NewOrder";
    case TemplateId::OrderAck:
      return "OrderAck";
    case TemplateId::ExecutionReport:
      return "ExecutionReport";
    case TemplateId::CancelOrder:
      return "CancelOrder";
    case TemplateId::Login:
      return "Login";
    case TemplateId::LoginResponse:
      return "LoginResponse";
    case TemplateId::Logout:
      return "Logout";
    case TemplateId::LogoutResponse:
      return "LogoutResponse";
    case TemplateId::MarketDataUpdate:
      return "MarketDataUpdate";
    case TemplateId::SessionChange:
      return "SessionChange";
    case TemplateId::AdminCommand:
      return "AdminCommand";
  }
  return "?";
}

std::string_view to_string(LoginStatus s) {
  switch (s) {
    case LoginStatus::Ok:
      return "Ok";
    case LoginStatus::AlreadyLoggedIn:
      return "AlreadyLoggedIn";
    case LoginStatus::InvalidCredentials:
      return "InvalidCredentials";
    case LoginStatus::NotLoggedIn:
      return "NotLoggedIn";
  }
  return "?";
}

std::string_view to_string(AckStatus s) {
  switch (s) {
    case AckStatus::Accepted:
      return "Accepted";
    case AckStatus::Rejected:
      return "Rejected";
    case AckStatus::Cancelled:
      return "Cancelled";
    case AckStatus::CancelRejected:
      return "CancelRejected";
    case AckStatus::Expired:
      return "Expired";
    case AckStatus::StopElected:
      return "StopElected";
  }
  return "?";
}

std::string_view to_string(DecodeError e) {
  switch (e) {
    case DecodeError::None:
      return "None";
    case DecodeError::TruncatedFrame:
      return "TruncatedFrame";
    case DecodeError::LengthMismatch:
      return "LengthMismatch";
    case DecodeError::UnknownTemplate:
      return "UnknownTemplate";
    case DecodeError::BadVersion:
      return "BadVersion";
    case DecodeError::InvalidField:
      return "InvalidField";
  }
  return "?";
}

std::size_t encode_into(const Frame& frame, std::span<std::uint8_t> out) {
  const TemplateId id = template_of(frame.body);
  const std::size_t length = frame_size(id);
  require(out.size() >= length, "buffer too small");
  Writer w(out.data());
  w.u32(static_cast<std::uint32_t>(length));
  w.u16(static_cast<std::uint16_t>(id));
  w.u16(kSchemaVersion);
  w.u32(frame.client_id);
  w.u64(frame.sequence);
  std::visit(BodyWriter{w}, frame.body);
  return length;
}

std::vector<std::uint8_t> encode(const Frame& frame) {
  std::vector<std::uint8_t> out(frame_size(template_of(frame.body)));
  encode_into(frame, out);
  return out;
}

DecodeResult decode(std::span<const std::uint8_t> bytes) {
  const auto fail = [](DecodeError e) { return DecodeResult{std::nullopt, e}; };
  if (bytes.size() < kHeaderSize) return fail(DecodeError::TruncatedFrame);
  Reader r(bytes.data());
  const std::uint32_t length = r.u32();
  const auto id = static_cast<TemplateId>(r.u16());
  const std::uint16_t version = r.u16();
  const std::size_t body = body_size(id);
  if (body == 0 && id != TemplateId::Logout) return fail(DecodeError::UnknownTemplate);
  if (version != kSchemaVersion) return fail(DecodeError::BadVersion);
  if (length != kHeaderSize + body) return fail(DecodeError::LengthMismatch);
  if (bytes.size() < length) return fail(DecodeError::TruncatedFrame);
  if (bytes.size() > length) return fail(DecodeError::LengthMismatch);

  Frame f;
  f.client_id = r.u32();
  f.sequence = r.u64();
  auto b = read_body(id, r);
  if (!b) return fail(DecodeError::InvalidField);
  f.body = std::move(*b);
  return DecodeResult{std::move(f), DecodeError::None};
}

}  // namespace matchbook::proto

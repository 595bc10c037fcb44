#include "matchbook/protocol/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <stdexcept>
#include <system_error>

namespace matchbook::proto {
namespace {

constexpr int kReceiveBuffer = 4 << 20;
constexpr std::size_t kMaxDatagram = 65536;

[[noreturn]] void throw_errno(const char* what) { throw std::system_error(errno, std::generic_category(), what); }

int make_socket() {
  const int fd = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw_errno("socket");
  int size = kReceiveBuffer;
  ::setsockopt(fd, SOL_SOCKET, SO_RCVBUF, &size, sizeof size);  // best effort
  return fd;
}

}  // namespace

std::string Endpoint::url() const { return "udp://" + host + ":" + std::to_string(port); }

Endpoint parse_endpoint(std::string_view url, std::int32_t stream_id) {
  constexpr std::string_view scheme = "udp://";
  if (url.substr(0, scheme.size()) != scheme) throw std::invalid_argument("endpoint must start with udp://");
  const auto rest = url.substr(scheme.size());
  const auto colon = rest.rfind(':');
  if (colon == std::string_view::npos || colon == 0) throw std::invalid_argument("endpoint needs host:port");
  const auto port_text = rest.substr(colon + 1);
  unsigned port = 0;
  auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (port_text.empty() || ec != std::errc{} || ptr != port_text.data() + port_text.size() || port > 65535) {
    throw std::invalid_argument("bad port in endpoint: " + std::string(url));
  }
  return Endpoint{std::string(rest.substr(0, colon)), static_cast<std::uint16_t>(port), stream_id};
}

SocketAddress SocketAddress::resolve(const Endpoint& e) {
  SocketAddress out;
  out.addr.sin_family = AF_INET;
  out.addr.sin_port = htons(e.port);
  if (::inet_pton(AF_INET, e.host.c_str(), &out.addr.sin_addr) == 1) return out;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(e.host.c_str(), nullptr, &hints, &res) != 0 || !res) {
    throw std::runtime_error("cannot resolve host " + e.host);
  }
  out.addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  ::freeaddrinfo(res);
  return out;
}

std::string SocketAddress::to_string() const {
  char buf[INET_ADDRSTRLEN] = {};
  ::inet_ntop(AF_INET, &addr.sin_addr, buf, sizeof buf);
  return std::string(buf) + ":" + std::to_string(port());
}

UdpSocket UdpSocket::bind(const Endpoint& local) {
  UdpSocket s(make_socket());
  const auto addr = SocketAddress::resolve(local);
  if (::bind(s.fd_, reinterpret_cast<const sockaddr*>(&addr.addr), sizeof addr.addr) != 0) {
    throw_errno(("bind " + local.url()).c_str());
  }
  return s;
}

UdpSocket UdpSocket::open() { return UdpSocket(make_socket()); }

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(other.fd_.exchange(-1)) {}

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_.exchange(-1);
  }
  return *this;
}

UdpSocket::~UdpSocket() { close(); }

void UdpSocket::close() {
  const int fd = fd_.exchange(-1);
  if (fd >= 0) {
    ::shutdown(fd, SHUT_RDWR);
    ::close(fd);
  }
}

void UdpSocket::send_to(const SocketAddress& to, std::span<const std::uint8_t> bytes) {
  const auto n = ::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr*>(&to.addr),
                          sizeof to.addr);
  if (n < 0) throw_errno("sendto");
}

std::optional<Datagram> UdpSocket::receive(std::chrono::milliseconds timeout) {
  const int fd = fd_;
  if (fd < 0) return std::nullopt;
  pollfd p{fd, POLLIN, 0};
  const int ready = ::poll(&p, 1, static_cast<int>(timeout.count()));
  if (ready <= 0 || !(p.revents & POLLIN)) return std::nullopt;
  Datagram d;
  d.bytes.resize(kMaxDatagram);
  socklen_t len = sizeof d.from.addr;
  const auto n = ::recvfrom(fd, d.bytes.data(), d.bytes.size(), 0, reinterpret_cast<sockaddr*>(&d.from.addr), &len);
  if (n < 0) {
    if (errno == EAGAIN || errno == EINTR || errno == EBADF) return std::nullopt;
    throw_errno("recvfrom");
  }
  d.bytes.resize(static_cast<std::size_t>(n));
  return d;
}

std::uint16_t UdpSocket::local_port() const {
  sockaddr_in a{};
  socklen_t len = sizeof a;
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&a), &len) != 0) throw_errno("getsockname");
  return ntohs(a.sin_port);
}

std::uint64_t SequenceTracker::observe(std::uint64_t sequence) {
  ++received_;
  if (!expected_) {
    expected_ = sequence + 1;
    return 0;
  }
  if (sequence < *expected_) {
    ++late_;
    return 0;
  }
  const std::uint64_t missing = sequence - *expected_;
  gaps_ += missing;
  expected_ = sequence + 1;
  return missing;
}

}  // namespace matchbook::proto

#include "svsp/udp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace svsp::net {

namespace {

// Splits "host:port" (IPv6 hosts in brackets) for getaddrinfo.
std::pair<std::string, std::string> split_addr(const std::string& addr_port) {
  if (!addr_port.empty() && addr_port.front() == '[') {
    size_t close = addr_port.find(']');
    if (close == std::string::npos || close + 1 >= addr_port.size() ||
        addr_port[close + 1] != ':') {
      throw UdpError("malformed address: " + addr_port);
    }
    return {addr_port.substr(1, close - 1), addr_port.substr(close + 2)};
  }
  size_t colon = addr_port.rfind(':');
  if (colon == std::string::npos || colon + 1 >= addr_port.size()) {
    throw UdpError("address must be host:port, got: " + addr_port);
  }
  return {addr_port.substr(0, colon), addr_port.substr(colon + 1)};
}

Peer resolve(const std::string& addr_port, bool passive) {
  auto [host, port] = split_addr(addr_port);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_DGRAM;
  hints.ai_protocol = IPPROTO_UDP;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* list = nullptr;
  int rc = getaddrinfo(host.empty() ? nullptr : host.c_str(), port.c_str(),
                       &hints, &list);
  if (rc != 0) {
    throw UdpError("cannot resolve " + addr_port + ": " + gai_strerror(rc));
  }
  Peer peer;
  std::memcpy(&peer.addr, list->ai_addr, list->ai_addrlen);
  peer.len = static_cast<socklen_t>(list->ai_addrlen);
  freeaddrinfo(list);
  return peer;
}

uint16_t port_of(const sockaddr_storage& ss) {
  if (ss.ss_family == AF_INET) {
    return ntohs(reinterpret_cast<const sockaddr_in&>(ss).sin_port);
  }
  if (ss.ss_family == AF_INET6) {
    return ntohs(reinterpret_cast<const sockaddr_in6&>(ss).sin6_port);
  }
  return 0;
}

}  // namespace

std::string Peer::to_string() const {
  char host[NI_MAXHOST];
  char serv[NI_MAXSERV];
  int rc = getnameinfo(reinterpret_cast<const sockaddr*>(&addr), len, host,
                       sizeof host, serv, sizeof serv,
                       NI_NUMERICHOST | NI_NUMERICSERV);
  if (rc != 0) return "<unprintable>";
  if (addr.ss_family == AF_INET6) {
    return std::string("[") + host + "]:" + serv;
  }
  return std::string(host) + ":" + serv;
}

bool Peer::operator==(const Peer& other) const {
  return len == other.len && std::memcmp(&addr, &other.addr, len) == 0;
}

Peer resolve_peer(const std::string& addr_port) {
  return resolve(addr_port, /*passive=*/false);
}

UdpEndpoint::UdpEndpoint(const std::string& bind_addr) {
  Peer local = resolve(bind_addr, /*passive=*/true);
  fd_ = socket(local.addr.ss_family, SOCK_DGRAM, IPPROTO_UDP);
  if (fd_ < 0) throw UdpError(std::string("socket: ") + std::strerror(errno));
  // No SO_REUSEADDR: UDP has no TIME_WAIT to dodge, and with it a second
  // server could silently bind the same port and steal datagrams.
  if (bind(fd_, reinterpret_cast<const sockaddr*>(&local.addr), local.len) <
      0) {
    int err = errno;
    close(fd_);
    fd_ = -1;
    throw UdpError("bind " + bind_addr + ": " + std::strerror(err));
  }
  sockaddr_storage bound{};
  socklen_t bound_len = sizeof bound;
  if (getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &bound_len) == 0) {
    local_port_ = port_of(bound);
  }
}

UdpEndpoint::~UdpEndpoint() {
  if (fd_ >= 0) close(fd_);
}

UdpEndpoint::UdpEndpoint(UdpEndpoint&& other) noexcept
    : fd_(other.fd_), local_port_(other.local_port_) {
  other.fd_ = -1;
}

void UdpEndpoint::send(BytesView datagram, const Peer& peer) {
  if (datagram.size() > wire::kMaxDatagram) {
    throw UdpError("datagram of " + std::to_string(datagram.size()) +
                   " bytes exceeds the " + std::to_string(wire::kMaxDatagram) +
                   "-byte cap");
  }
  ssize_t sent =
      sendto(fd_, datagram.data(), datagram.size(), 0,
             reinterpret_cast<const sockaddr*>(&peer.addr), peer.len);
  if (sent < 0 || static_cast<size_t>(sent) != datagram.size()) {
    throw UdpError(std::string("sendto: ") + std::strerror(errno));
  }
}

std::optional<std::pair<Bytes, Peer>> UdpEndpoint::receive(
    uint32_t timeout_ms) {
  pollfd pfd{fd_, POLLIN, 0};
  int rc = poll(&pfd, 1, static_cast<int>(timeout_ms));
  if (rc < 0) {
    if (errno == EINTR) return std::nullopt;
    throw UdpError(std::string("poll: ") + std::strerror(errno));
  }
  if (rc == 0) return std::nullopt;

  Bytes buf(wire::kMaxDatagram + 512);
  Peer from;
  from.len = sizeof from.addr;
  ssize_t got = recvfrom(fd_, buf.data(), buf.size(), 0,
                         reinterpret_cast<sockaddr*>(&from.addr), &from.len);
  if (got < 0) {
    if (errno == EINTR || errno == EAGAIN) return std::nullopt;
    throw UdpError(std::string("recvfrom: ") + std::strerror(errno));
  }
  buf.resize(static_cast<size_t>(got));
  return std::make_pair(std::move(buf), from);
}

std::string UdpEndpoint::local_address() const {
  sockaddr_storage bound{};
  socklen_t bound_len = sizeof bound;
  if (getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &bound_len) != 0) {
    return "<unknown>";
  }
  Peer p;
  std::memcpy(&p.addr, &bound, sizeof bound);
  p.len = bound_len;
  return p.to_string();
}

}  // namespace svsp::net

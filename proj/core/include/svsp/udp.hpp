#pragma once

#include <netinet/in.h>
#include <sys/socket.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "svsp/bytes.hpp"
#include "svsp/wire.hpp"

namespace svsp::net {

class UdpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One remote socket address.  Comparable so drivers can pin sessions to the
// peer that opened them.
struct Peer {
  sockaddr_storage addr{};
  socklen_t len = 0;

  std::string to_string() const;
  bool operator==(const Peer& other) const;
};

// "host:port" / "[v6]:port" → resolved peer.  Throws UdpError.
Peer resolve_peer(const std::string& addr_port);

// Thin blocking UDP socket: datagrams in, datagrams out, nothing retained.
class UdpEndpoint {
 public:
  // Binds "host:port" (port 0 picks an ephemeral one).  Throws UdpError.
  explicit UdpEndpoint(const std::string& bind_addr);
  ~UdpEndpoint();

  UdpEndpoint(UdpEndpoint&& other) noexcept;
  UdpEndpoint& operator=(UdpEndpoint&&) = delete;
  UdpEndpoint(const UdpEndpoint&) = delete;

  // Throws UdpError on datagrams over wire::kMaxDatagram or send failure.
  void send(BytesView datagram, const Peer& peer);

  // Blocks up to timeout_ms; nullopt = timeout.  Throws UdpError on socket
  // errors.
  std::optional<std::pair<Bytes, Peer>> receive(uint32_t timeout_ms);

  uint16_t local_port() const { return local_port_; }
  std::string local_address() const;

 private:
  int fd_ = -1;
  uint16_t local_port_ = 0;
};

}  // namespace svsp::net

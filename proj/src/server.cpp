#include "musim/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <iostream>
#include <thread>
#include <vector>

#include "musim/protocol.hpp"

namespace musim {

namespace {

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

Server::~Server() {
  if (listenFd_ >= 0) ::close(listenFd_);
}

void Server::bind(const std::string& host, int port) {
  listenFd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listenFd_ < 0) throw BindFailure(std::string("socket: ") + std::strerror(errno));

  const int one = 1;
  ::setsockopt(listenFd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw BindFailure("bad listen address: " + host);
  }
  if (::bind(listenFd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    throw BindFailure("bind " + host + ":" + std::to_string(port) + ": " +
                      std::strerror(errno));
  }
  if (::listen(listenFd_, 64) != 0) {
    throw BindFailure(std::string("listen: ") + std::strerror(errno));
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(listenFd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = static_cast<int>(ntohs(bound.sin_port));
}

void Server::track(int fd) {
  const std::lock_guard<std::mutex> lock(connectionsMutex_);
  connections_.insert(fd);
}

void Server::untrack(int fd) {
  const std::lock_guard<std::mutex> lock(connectionsMutex_);
  connections_.erase(fd);
}

void Server::stop() {
  stopping_.store(true);
  const std::lock_guard<std::mutex> lock(connectionsMutex_);
  for (int fd : connections_) ::shutdown(fd, SHUT_RDWR);
}

void Server::handle_connection(int fd) {
  Env env(envCfg_, *policy_);
  std::string buffer;
  char chunk[4096];
  for (;;) {
    const ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n <= 0) break;  // peer gone mid-episode: session is simply dropped
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t nl;
    bool alive = true;
    while (alive && (nl = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      alive = send_all(fd, process_line(env, line) + "\n");
    }
    if (!alive) break;
  }
  env.abort();
  untrack(fd);
  ::close(fd);
}

void Server::run() {
  if (listenFd_ < 0) throw BindFailure("server is not bound");
  std::vector<std::thread> workers;
  while (!stopping_.load()) {
    pollfd pfd{listenFd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 200);
    if (ready <= 0) continue;
    const int fd = ::accept(listenFd_, nullptr, nullptr);
    if (fd < 0) continue;
    track(fd);
    workers.emplace_back([this, fd] { handle_connection(fd); });
  }
  for (auto& w : workers) w.join();
}

void Server::run_stdio() {
  Env env(envCfg_, *policy_);
  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    std::cout << process_line(env, line) << "\n" << std::flush;
  }
  env.abort();
}

}  // namespace musim

#pragma once

#include <atomic>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>

#include "musim/env.hpp"
#include "musim/policy.hpp"

namespace musim {

struct BindFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Stream-socket front end for the line protocol. One connection owns one
// isolated session processed strictly in request order; the policy object
// is shared read-only across connections.
class Server {
 public:
  Server(EnvConfig envCfg, EldPolicy& policy) : envCfg_(envCfg), policy_(&policy) {}
  ~Server();

  // Binds a listening socket; port 0 picks a free port.
  void bind(const std::string& host, int port);
  int port() const { return port_; }

  // Accept loop; returns after stop(). Safe to call from one thread while
  // another calls stop(); stop shuts active connections down so in-flight
  // handlers drain promptly.
  void run();
  void stop();

  // Single session over stdin/stdout instead of a socket.
  void run_stdio();

 private:
  void handle_connection(int fd);
  void track(int fd);
  void untrack(int fd);

  EnvConfig envCfg_;
  EldPolicy* policy_;
  int listenFd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex connectionsMutex_;
  std::set<int> connections_;
};

}  // namespace musim

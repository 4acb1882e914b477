#pragma once

#include <memory>
#include <string>

#include "netting/store.hpp"
#include "netting/workbench.hpp"

namespace netting::service {

// Local HTTP/1.1 service exposing the workbench operations with JSON bodies.
// Binds 127.0.0.1 unless told otherwise; there is no authentication.
class Server {
 public:
  explicit Server(store::LifecycleStore& store);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Returns the bound port (port 0 picks a free one), or -1 on failure.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace netting::service

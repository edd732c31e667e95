#pragma once

#include <memory>
#include <string>

#include "privrec/service.hpp"

namespace privrec {

/// cpp-httplib transport for Service. The handler may run on several
/// worker threads at once.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds `host:port` (port 0 picks a free port). Throws Error when the
  /// address is unavailable. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace privrec

#include "privrec/http_server.hpp"

#include <httplib.h>

#include "privrec/error.hpp"

namespace privrec {

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;

  explicit Impl(Service& s) : service(s) {
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
      const auto out = service.handle({req.method, req.path, req.body});
      res.status = out.status;
      res.set_content(out.body, out.content_type);
    };
    // SO_REUSEADDR only: httplib's default SO_REUSEPORT would let a second
    // server silently share a busy port.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    server.Get(R"(/api/.*)", dispatch);
    server.Post(R"(/api/.*)", dispatch);
  }
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port) + " (port busy?)");
  return bound;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace privrec

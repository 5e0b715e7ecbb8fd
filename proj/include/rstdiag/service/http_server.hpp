#pragma once

#include <memory>
#include <string>

#include "rstdiag/service/rater_service.hpp"

namespace httplib {
class Server;
}

namespace rstdiag::service {

/// JSON over HTTP in front of a RaterService:
///   GET  /diagrams                       GET  /diagrams/{id}
///   GET  /diagrams/{id}/image.png        GET  /assignments?rater=
///   POST /diagrams/{id}/scores           POST /diagrams/{id}/consensus-hallucination
///   GET  /summary/irr                    GET  /rubric/test-vectors
/// Every request needs "Authorization: Bearer <token>" except the test
/// vectors. Errors are {"error": message} with the matching status.
class HttpServer {
 public:
  explicit HttpServer(RaterService& service, std::string cors_origin = "*");
  ~HttpServer();

  /// Binds; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void listen();
  void stop();
  bool running() const;

 private:
  RaterService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace rstdiag::service

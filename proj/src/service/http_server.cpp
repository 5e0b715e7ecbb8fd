#include "rstdiag/service/http_server.hpp"

#include <httplib.h>

#include "rstdiag/core/json.hpp"
#include "rstdiag/rubric/rubric.hpp"

namespace rstdiag::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string bearer(const httplib::Request& req) {
  auto h = req.get_header_value("Authorization");
  const std::string prefix = "Bearer ";
  if (h.compare(0, prefix.size(), prefix) != 0) return {};
  return h.substr(prefix.size());
}

}  // namespace

HttpServer::HttpServer(RaterService& service, std::string cors_origin)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  s.set_default_headers({{"Access-Control-Allow-Origin", cors_origin},
                         {"Access-Control-Allow-Headers", "Authorization, Content-Type"},
                         {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  s.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  // Wraps a handler with authentication and error mapping.
  auto guarded = [this](auto fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      try {
        Viewer viewer = service_.authenticate(bearer(req));
        fn(req, res, viewer);
      } catch (const ServiceError& e) {
        send_json(res, e.status(), {{"error", e.what()}});
      } catch (const json::exception& e) {
        send_json(res, 400, {{"error", e.what()}});
      } catch (const std::exception& e) {
        send_json(res, 500, {{"error", e.what()}});
      }
    };
  };

  s.Get("/rubric/test-vectors", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, rubric::export_test_vectors());
  });

  s.Get("/diagrams", guarded([this](const httplib::Request&, httplib::Response& res, const Viewer& v) {
          send_json(res, 200, service_.list_diagrams(v));
        }));

  s.Get(R"(/diagrams/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res,
                                                const Viewer& v) {
          send_json(res, 200, service_.get_diagram(req.matches[1], v));
        }));

  s.Get(R"(/diagrams/([^/]+)/image\.png)",
        guarded([this](const httplib::Request& req, httplib::Response& res, const Viewer& v) {
          std::string id = req.matches[1];
          service_.get_diagram(id, v);  // access check
          auto [bytes, mime] = service_.get_image(id);
          res.status = 200;
          res.set_content(bytes, mime);
        }));

  s.Get("/assignments", guarded([this](const httplib::Request& req, httplib::Response& res, const Viewer& v) {
          std::string rater = req.has_param("rater") ? req.get_param_value("rater") : v.rater_id.value_or("");
          if (rater.empty()) throw ServiceError(400, "rater parameter required");
          if (!v.admin && rater != *v.rater_id) throw ServiceError(403, "cannot list another rater's queue");
          send_json(res, 200, {{"rater", rater}, {"pending", service_.pending(rater)}});
        }));

  s.Post(R"(/diagrams/([^/]+)/scores)",
         guarded([this](const httplib::Request& req, httplib::Response& res, const Viewer& v) {
           if (!v.rater_id) throw ServiceError(403, "only raters submit scores");
           auto body = json::parse(req.body);
           auto a = service_.submit_scores(*v.rater_id, req.matches[1], body);
           send_json(res, 201, json(a));
         }));

  s.Post(R"(/diagrams/([^/]+)/consensus-hallucination)",
         guarded([this](const httplib::Request& req, httplib::Response& res, const Viewer& v) {
           if (!v.admin) throw ServiceError(403, "consensus tags are admin only");
           auto tags = parse_hallucination_tags(json::parse(req.body));
           service_.submit_consensus(req.matches[1], tags);
           send_json(res, 200, json(tags));
         }));

  s.Get("/summary/irr", guarded([this](const httplib::Request&, httplib::Response& res, const Viewer& v) {
          if (!v.admin) throw ServiceError(403, "summary is admin only");
          send_json(res, 200, service_.irr_summary_json());
        }));
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  if (!server_->bind_to_port(host, port)) return -1;
  return port;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

bool HttpServer::running() const { return server_->is_running(); }

}  // namespace rstdiag::service

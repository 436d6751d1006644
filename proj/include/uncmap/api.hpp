#pragma once

// HTTP/JSON service.
//
//   GET  /api/health                -> {"status":"ok"}
//   GET  /api/datasets              -> [DatasetSummary]
//   GET  /api/datasets/diagnostics  -> [Diagnostic] from the last scan
//   POST /api/datasets/refresh      -> [DatasetSummary] after a rescan
//   GET  /api/models                -> [ModelDescriptor]
//   GET  /api/measures              -> [MeasureDescriptor]
//   POST /api/heatmap               -> HeatmapResponse
//
// Errors are {"code": ..., "message": ...} with a status derived from the code.
// Service handlers are plain functions of the request body so they can be
// exercised without a socket; mount() wires them onto a cpp-httplib server.

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "uncmap/dataset.hpp"
#include "uncmap/error.hpp"
#include "uncmap/gridmap.hpp"
#include "uncmap/heatmap.hpp"
#include "uncmap/measures.hpp"

// httplib pulls in <resolv.h>, whose `_res` macro collides with Eigen
// parameter names; it must come after Eigen and the macro is dropped.
#include <httplib.h>
#undef _res

namespace uncmap::api {

struct Response {
  int status = 200;
  nlohmann::json body;
};

inline int http_status(std::string_view code) {
  if (code == "not_found") return 404;
  if (code == "bad_request") return 400;
  if (code == "invalid_argument" || code == "capability_mismatch" || code == "validation_error") return 422;
  if (code == "timeout") return 503;
  return 500;
}

inline Response error_response(std::string_view code, std::string_view message) {
  return {http_status(code), {{"code", code}, {"message", message}}};
}

struct ServiceOptions {
  unsigned workers = default_workers();
  std::chrono::milliseconds request_timeout{30'000};
  std::string cors_origin = "*";
  std::size_t cache_capacity = 32;
};

class Service {
public:
  explicit Service(std::filesystem::path data_dir, ServiceOptions options = {})
      : options_(std::move(options)), store_(std::move(data_dir)), cache_(options_.cache_capacity) {}

  const ServiceOptions& options() const noexcept { return options_; }
  DatasetStore& store() noexcept { return store_; }
  ModelCache& cache() noexcept { return cache_; }

  Response health() const { return {200, {{"status", "ok"}}}; }

  Response datasets() const {
    return guarded([&] { return Response{200, summaries_json(store_.summaries())}; });
  }

  Response diagnostics() const {
    return guarded([&] {
      nlohmann::json a = nlohmann::json::array();
      for (const auto& d : store_.diagnostics()) a.push_back(to_json(d));
      return Response{200, a};
    });
  }

  Response refresh() {
    return guarded([&] { return Response{200, summaries_json(store_.refresh().summaries)}; });
  }

  Response models() const {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& m : model_registry()) a.push_back(to_json(m));
    return {200, a};
  }

  Response measures() const {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& m : measure_registry()) a.push_back(to_json(m));
    return {200, a};
  }

  Response heatmap(std::string_view body) {
    return guarded([&] {
      nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
      if (j.is_discarded()) throw BadRequest("request body is not valid JSON");
      const HeatmapRequest req = heatmap_request_from_json(j);
      const Deadline deadline = std::chrono::steady_clock::now() + options_.request_timeout;
      return Response{200, to_json(compute_heatmap(store_, cache_, req, options_.workers, deadline))};
    });
  }

private:
  static nlohmann::json summaries_json(const std::vector<DatasetSummary>& list) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& s : list) a.push_back(to_json(s));
    return a;
  }

  template <class F>
  static Response guarded(F&& f) {
    try {
      return f();
    } catch (const Error& e) {
      return error_response(e.code(), e.what());
    } catch (const std::exception& e) {
      return error_response("internal_error", e.what());
    }
  }

  ServiceOptions options_;
  DatasetStore store_;
  ModelCache cache_;
};

/// Registers the API routes, CORS handling, and (optionally) static files
/// under `/` from `ui_dir`.
inline void mount(httplib::Server& server, Service& service,
                  const std::optional<std::filesystem::path>& ui_dir = std::nullopt) {
  auto send = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  const std::string origin = service.options().cors_origin;

  server.Get("/api/health", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.health());
  });
  server.Get("/api/datasets", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.datasets());
  });
  server.Get("/api/datasets/diagnostics", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.diagnostics());
  });
  server.Post("/api/datasets/refresh", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.refresh());
  });
  server.Get("/api/models", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.models());
  });
  server.Get("/api/measures", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.measures());
  });
  server.Post("/api/heatmap", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.heatmap(req.body));
  });
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  if (!origin.empty()) {
    server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", origin);
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
  }

  server.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send(res, error_response("internal_error", e.what()));
    } catch (...) {
      send(res, error_response("internal_error", "unknown error"));
    }
  });

  const auto timeout = std::chrono::duration_cast<std::chrono::seconds>(service.options().request_timeout);
  server.set_read_timeout(timeout);
  server.set_write_timeout(timeout);

  if (ui_dir) {
    if (!server.set_mount_point("/", ui_dir->string()))
      throw ConfigError("UI directory '" + ui_dir->string() + "' does not exist");
  }
}

}  // namespace uncmap::api

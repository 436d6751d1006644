// uncmap: serve the uncertainty-map API, or compute one heatmap to a file.
//
// Exit codes: 0 ok, 1 internal error, 2 usage or environment, 3 invalid request.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "uncmap/uncmap.hpp"
#include "uncmap/api.hpp"

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRequest = 3;

int exit_code_for(const uncmap::Error& e) {
  const std::string& c = e.code();
  if (c == "config_error") return kExitUsage;
  if (c == "internal_error" || c == "timeout") return kExitInternal;
  return kExitRequest;
}

struct ServeArgs {
  std::string host = "0.0.0.0";
  int port = 8080;
  std::string data_dir = "datasets";
  std::string ui_dir;
  std::string cors_origin = "*";
  unsigned workers = uncmap::default_workers();
  int timeout_ms = 30'000;
};

struct ComputeArgs {
  std::string data_dir = "datasets";
  std::string dataset;
  std::string features;
  bool pca = false;
  std::optional<bool> standardize;
  std::string model;
  std::string measure;
  int resolution = uncmap::kDefaultResolution;
  double margin = uncmap::kDefaultMargin;
  std::string out;
  unsigned workers = uncmap::default_workers();
};

int run_serve(const ServeArgs& a) {
  std::error_code ec;
  if (!std::filesystem::is_directory(a.data_dir, ec)) {
    std::cerr << "error: data directory '" << a.data_dir << "' does not exist\n";
    return kExitUsage;
  }
  uncmap::api::ServiceOptions opts;
  opts.workers = a.workers;
  opts.cors_origin = a.cors_origin;
  opts.request_timeout = std::chrono::milliseconds(a.timeout_ms);
  uncmap::api::Service service(a.data_dir, opts);
  for (const auto& d : service.store().diagnostics()) std::cerr << "warning: skipped " << d.to_string() << '\n';

  httplib::Server server;
  std::optional<std::filesystem::path> ui;
  if (!a.ui_dir.empty()) ui = a.ui_dir;
  uncmap::api::mount(server, service, ui);

  int port = a.port;
  if (port == 0) {
    port = server.bind_to_any_port(a.host);
    if (port < 0) {
      std::cerr << "error: cannot bind " << a.host << '\n';
      return kExitUsage;
    }
  } else if (!server.bind_to_port(a.host, port)) {
    std::cerr << "error: cannot bind " << a.host << ':' << port << '\n';
    return kExitUsage;
  }
  std::cout << "listening on http://" << a.host << ':' << port << std::endl;
  return server.listen_after_bind() ? 0 : kExitInternal;
}

int run_compute(const ComputeArgs& a) {
  const std::filesystem::path out_path(a.out);
  const std::string ext = out_path.extension().string();
  if (ext != ".csv" && ext != ".json") {
    std::cerr << "error: --out must end in .csv or .json\n";
    return kExitUsage;
  }

  uncmap::HeatmapRequest req;
  req.dataset_id = a.dataset;
  req.measure_id = a.measure;
  req.resolution = a.resolution;
  req.margin_fraction = a.margin;
  req.classifier = uncmap::ClassifierSpec::parse(a.model);
  if (a.pca) {
    req.projection = uncmap::ProjectionSpec::pca(a.standardize.value_or(true));
  } else {
    const auto comma = a.features.find(',');
    if (comma == std::string::npos) throw uncmap::InvalidArgument("--features expects two names as x,y");
    req.projection = uncmap::ProjectionSpec::pair(a.features.substr(0, comma), a.features.substr(comma + 1),
                                                  a.standardize.value_or(false));
  }

  uncmap::DatasetStore store(a.data_dir);
  uncmap::ModelCache cache;
  const auto res = uncmap::compute_heatmap(store, cache, req, a.workers);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << a.out << "'\n";
    return kExitUsage;
  }
  if (ext == ".csv")
    uncmap::write_grid_csv(out, res.components);
  else
    out << uncmap::to_json(res).dump() << '\n';
  out.close();

  std::printf("cells=%zu components=%zu fit_ms=%.3f eval_ms=%.3f\n", res.grid.cells(), res.components.size(),
              res.fit_ms, res.eval_ms);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty maps for 2D classifiers"};
  app.require_subcommand(1);

  ServeArgs serve;
  auto* s = app.add_subcommand("serve", "Serve the HTTP API (and optionally a static UI)");
  s->add_option("--host", serve.host, "Listen address");
  s->add_option("--port", serve.port, "Listen port; 0 picks a free port")->envname("UNCMAP_PORT");
  s->add_option("--data-dir", serve.data_dir, "Folder of CSV datasets")->envname("UNCMAP_DATA_DIR");
  s->add_option("--ui-dir", serve.ui_dir, "Static files served at /");
  s->add_option("--cors-origin", serve.cors_origin, "Access-Control-Allow-Origin value; empty disables CORS");
  s->add_option("--workers", serve.workers, "Grid evaluation threads")->check(CLI::PositiveNumber);
  s->add_option("--timeout-ms", serve.timeout_ms, "Per-request compute budget")->check(CLI::PositiveNumber);

  ComputeArgs compute;
  auto* c = app.add_subcommand("compute", "Compute one heatmap and write it to a file");
  c->add_option("--data-dir", compute.data_dir, "Folder of CSV datasets")->envname("UNCMAP_DATA_DIR");
  c->add_option("--dataset", compute.dataset, "Dataset id (file name without .csv)")->required();
  auto* feat = c->add_option("--features", compute.features, "Feature pair as x,y");
  auto* pca = c->add_flag("--pca", compute.pca, "Project onto the first two principal components");
  feat->excludes(pca);
  c->add_flag("--standardize,!--no-standardize", compute.standardize, "Standardize columns before use");
  c->add_option("--model", compute.model, "Classifier as kind[:key=val,...], e.g. knn:k=5")->required();
  c->add_option("--measure", compute.measure, "Measure id")->required();
  c->add_option("--resolution", compute.resolution, "Cells per axis");
  c->add_option("--margin", compute.margin, "Bounds margin as a fraction of the data range");
  c->add_option("--out", compute.out, "Output file (.csv or .json)")->required();
  c->add_option("--workers", compute.workers, "Grid evaluation threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (s->parsed()) return run_serve(serve);
    if (!compute.pca && compute.features.empty()) {
      std::cerr << "error: one of --features or --pca is required\n";
      return kExitUsage;
    }
    return run_compute(compute);
  } catch (const uncmap::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

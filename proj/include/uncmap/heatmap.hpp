#pragma once

// The request -> heatmap pipeline shared by the HTTP service and the CLI, and
// the JSON forms of its inputs and outputs.

#include <array>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "uncmap/classifiers/classifier.hpp"
#include "uncmap/dataset.hpp"
#include "uncmap/error.hpp"
#include "uncmap/gridmap.hpp"
#include "uncmap/measures.hpp"
#include "uncmap/projection.hpp"

namespace uncmap {

struct HeatmapRequest {
  std::string dataset_id;
  ProjectionSpec projection;
  ClassifierSpec classifier;
  std::string measure_id;
  int resolution = kDefaultResolution;
  double margin_fraction = kDefaultMargin;
};

struct HeatmapResponse {
  GridSpec grid;
  std::vector<HeatmapGrid> components;
  std::vector<ScatterPoint> scatter;
  std::vector<std::string> class_names;
  std::array<std::string, 2> axis_labels;
  const MeasureDescriptor* measure = nullptr;
  double fit_ms = 0.0;
  double eval_ms = 0.0;
  bool cached = false;
};

inline HeatmapResponse compute_heatmap(const DatasetStore& store, ModelCache& cache, const HeatmapRequest& req,
                                       unsigned workers = default_workers(), Deadline deadline = kNoDeadline) {
  if (req.resolution < kMinResolution || req.resolution > kMaxResolution)
    throw InvalidArgument("resolution " + std::to_string(req.resolution) + " outside [" +
                          std::to_string(kMinResolution) + ", " + std::to_string(kMaxResolution) + "]");
  if (!(req.margin_fraction >= 0.0) || !std::isfinite(req.margin_fraction))
    throw InvalidArgument("margin_fraction must be a finite value >= 0");
  const MeasureDescriptor& measure = find_measure(req.measure_id);
  check_compatible(req.classifier.kind, measure);
  const Dataset ds = store.load(req.dataset_id);

  const auto fitted = cache.get_or_fit(ds, req.projection, req.classifier);
  const FittedContext& ctx = *fitted.context;

  HeatmapResponse out;
  out.grid = make_grid(data_bounds(ctx.projection, req.margin_fraction), req.resolution);
  const auto start = std::chrono::steady_clock::now();
  out.components = evaluate(ctx.model, measure, out.grid, workers, deadline);
  out.eval_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  out.fit_ms = fitted.hit ? 0.0 : ctx.fit_ms;
  out.cached = fitted.hit;
  out.scatter = scatter_overlay(ds, ctx.projection);
  out.class_names = ds.class_names;
  out.axis_labels = ctx.projection.axis_labels;
  out.measure = &measure;
  return out;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json to_json(const DatasetSummary& s) {
  return {{"id", s.id},
          {"n", s.n},
          {"d", s.d},
          {"k", s.k},
          {"feature_names", s.feature_names},
          {"class_names", s.class_names},
          {"feature_min", s.feature_min},
          {"feature_max", s.feature_max}};
}

inline nlohmann::json to_json(const Diagnostic& d) {
  return {{"file", d.file}, {"row", d.row}, {"column", d.column}, {"message", d.message}};
}

inline nlohmann::json to_json(const ModelDescriptor& m) {
  nlohmann::json caps = nlohmann::json::array();
  for (auto c : m.capabilities) caps.push_back(to_string(c));
  nlohmann::json params = nlohmann::json::array();
  for (const auto& h : m.hyperparams)
    params.push_back({{"name", h.name},
                      {"type", h.integer ? "int" : "real"},
                      {"default", h.default_value},
                      {"min", h.min},
                      {"max", h.max},
                      {"min_inclusive", h.min_inclusive},
                      {"max_inclusive", h.max_inclusive},
                      {"description", h.description}});
  return {{"id", m.id},
          {"display_name", m.display_name},
          {"capabilities", caps},
          {"hyperparams", params},
          {"reference", m.reference}};
}

inline nlohmann::json to_json(const MeasureDescriptor& m) {
  return {{"id", m.id},
          {"display_name", m.display_name},
          {"required_capability", to_string(m.required_capability)},
          {"components", m.components},
          {"reference", m.reference}};
}

inline nlohmann::json to_json(const GridSpec& g) {
  return {{"x0", g.x0}, {"y0", g.y0}, {"dx", g.dx}, {"dy", g.dy}, {"nx", g.nx}, {"ny", g.ny}};
}

inline nlohmann::json to_json(const HeatmapResponse& r) {
  nlohmann::json components = nlohmann::json::array();
  for (const auto& c : r.components)
    components.push_back(
        {{"name", c.component_name}, {"values", c.values}, {"raw_min", c.raw_min}, {"raw_max", c.raw_max}, {"flat", c.flat}});
  nlohmann::json scatter = nlohmann::json::array();
  for (const auto& p : r.scatter) scatter.push_back({p.x, p.y, p.class_index});
  nlohmann::json j = {{"grid", to_json(r.grid)},
                      {"components", components},
                      {"scatter", scatter},
                      {"class_names", r.class_names},
                      {"axis_labels", r.axis_labels},
                      {"timings", {{"fit_ms", r.fit_ms}, {"eval_ms", r.eval_ms}}},
                      {"cached", r.cached}};
  if (r.measure != nullptr)
    j["measure"] = {{"id", r.measure->id}, {"display_name", r.measure->display_name}, {"reference", r.measure->reference}};
  return j;
}

namespace detail {

template <class T>
T field(const nlohmann::json& j, const char* name, const char* type_name) {
  if (!j.contains(name)) throw BadRequest(std::string("missing field '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw BadRequest(std::string("field '") + name + "' must be " + type_name);
  }
}

template <class T>
T field_or(const nlohmann::json& j, const char* name, const char* type_name, T fallback) {
  return j.contains(name) ? field<T>(j, name, type_name) : fallback;
}

}  // namespace detail

inline ProjectionSpec projection_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw BadRequest("'projection' must be an object");
  const std::string mode = detail::field<std::string>(j, "mode", "a string");
  if (mode == "pca") return ProjectionSpec::pca(detail::field_or<bool>(j, "standardize", "a boolean", true));
  if (mode == "feature_pair")
    return ProjectionSpec::pair(detail::field<std::string>(j, "feature_x", "a string"),
                                detail::field<std::string>(j, "feature_y", "a string"),
                                detail::field_or<bool>(j, "standardize", "a boolean", false));
  throw InvalidArgument("unknown projection mode '" + mode + "'");
}

inline ClassifierSpec classifier_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw BadRequest("'classifier' must be an object");
  ClassifierSpec spec{parse_classifier_kind(detail::field<std::string>(j, "kind", "a string")), {}};
  if (j.contains("hyperparams")) {
    const auto& hp = j.at("hyperparams");
    if (!hp.is_object()) throw BadRequest("'hyperparams' must be an object");
    for (const auto& [key, value] : hp.items()) {
      if (!value.is_number()) throw BadRequest("hyperparameter '" + key + "' must be a number");
      spec.hyperparams[key] = value.get<double>();
    }
  }
  return spec;
}

inline HeatmapRequest heatmap_request_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw BadRequest("request body must be a JSON object");
  HeatmapRequest r;
  r.dataset_id = detail::field<std::string>(j, "dataset_id", "a string");
  r.projection = projection_from_json(detail::field<nlohmann::json>(j, "projection", "an object"));
  r.classifier = classifier_from_json(detail::field<nlohmann::json>(j, "classifier", "an object"));
  r.measure_id = detail::field<std::string>(j, "measure_id", "a string");
  if (j.contains("resolution") && !j.at("resolution").is_number_integer())
    throw BadRequest("field 'resolution' must be an integer");
  const auto res = detail::field_or<std::int64_t>(j, "resolution", "an integer", kDefaultResolution);
  if (res < kMinResolution || res > kMaxResolution)
    throw InvalidArgument("resolution " + std::to_string(res) + " outside [" + std::to_string(kMinResolution) + ", " +
                          std::to_string(kMaxResolution) + "]");
  r.resolution = static_cast<int>(res);
  r.margin_fraction = detail::field_or<double>(j, "margin_fraction", "a number", kDefaultMargin);
  return r;
}

}  // namespace uncmap

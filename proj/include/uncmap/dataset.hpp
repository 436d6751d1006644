#pragma once

// CSV dataset ingestion and the watched-folder catalog.
//
// File contract: comma-delimited UTF-8, first row is a header, the last column
// is the class label (free text without commas), every other column is a
// finite real written with '.' as decimal separator. Empty cells are errors.
// Classes are numbered in order of first appearance.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "uncmap/error.hpp"

namespace uncmap {

struct Dataset {
  std::string id;
  std::vector<std::string> feature_names;
  Eigen::MatrixXd X;  // N x d
  std::vector<int> y;
  std::vector<std::string> class_names;
  std::string label_name = "label";
  std::filesystem::path source_path;
  // Hash of the raw file bytes; lets caches notice a file rewritten in place.
  std::uint64_t fingerprint = 0;

  std::size_t n_rows() const noexcept { return y.size(); }
  std::size_t n_features() const noexcept { return feature_names.size(); }
  std::size_t n_classes() const noexcept { return class_names.size(); }

  std::size_t feature_index(std::string_view name) const {
    auto it = std::find(feature_names.begin(), feature_names.end(), name);
    if (it == feature_names.end())
      throw InvalidArgument("dataset '" + id + "' has no feature named '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - feature_names.begin());
  }
};

struct DatasetSummary {
  std::string id;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t k = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::vector<double> feature_min;
  std::vector<double> feature_max;

  friend bool operator==(const DatasetSummary&, const DatasetSummary&) = default;
};

/// Location of a rejected input. `row` is the 1-based line number in the file
/// (the header is line 1); 0 means the problem concerns the whole file.
struct Diagnostic {
  std::string file;
  std::size_t row = 0;
  std::string column;
  std::string message;

  std::string to_string() const {
    std::string s = file;
    if (row > 0) s += ":" + std::to_string(row);
    if (!column.empty()) s += ": column '" + column + "'";
    return s + ": " + message;
  }

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

class DatasetFormatError : public ValidationError {
public:
  explicit DatasetFormatError(Diagnostic d) : ValidationError(d.to_string()), diag_(std::move(d)) {}
  const Diagnostic& diagnostic() const noexcept { return diag_; }

private:
  Diagnostic diag_;
};

inline DatasetSummary summarize(const Dataset& ds) {
  DatasetSummary s;
  s.id = ds.id;
  s.n = ds.n_rows();
  s.d = ds.n_features();
  s.k = ds.n_classes();
  s.feature_names = ds.feature_names;
  s.class_names = ds.class_names;
  s.feature_min.resize(s.d);
  s.feature_max.resize(s.d);
  for (std::size_t j = 0; j < s.d; ++j) {
    s.feature_min[j] = ds.X.col(static_cast<Eigen::Index>(j)).minCoeff();
    s.feature_max[j] = ds.X.col(static_cast<Eigen::Index>(j)).maxCoeff();
  }
  return s;
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

inline std::optional<double> parse_real(std::string_view cell) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace detail

/// Parses CSV text. `file` and `id` only label diagnostics and the result.
inline Dataset parse_dataset_csv(std::string_view text, const std::string& id, const std::string& file) {
  auto fail = [&](std::size_t row, std::string column, std::string message) -> Dataset {
    throw DatasetFormatError(Diagnostic{file, row, std::move(column), std::move(message)});
  };

  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t pos = text.find('\n', start);
      if (pos == std::string_view::npos) pos = text.size();
      std::string_view line = text.substr(start, pos - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      lines.push_back(line);
      start = pos + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
  }
  if (lines.empty()) return fail(0, "", "file is empty");

  const auto header = detail::split_commas(lines[0]);
  if (header.size() < 3)
    return fail(1, "", "need at least two feature columns and one label column, found " +
                           std::to_string(header.size()) + " column(s)");
  {
    std::unordered_set<std::string_view> seen;
    for (const auto& h : header) {
      if (h.empty()) return fail(1, "", "empty column name in header");
      if (!seen.insert(h).second) return fail(1, std::string(h), "duplicate column name");
    }
  }

  Dataset ds;
  ds.id = id;
  const std::size_t d = header.size() - 1;
  for (std::size_t j = 0; j < d; ++j) ds.feature_names.emplace_back(header[j]);
  const std::string label_column(header.back());
  ds.label_name = label_column;

  std::vector<double> values;
  std::unordered_map<std::string_view, int> class_index;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::size_t row = r + 1;
    if (lines[r].empty()) return fail(row, "", "empty row");
    const auto cells = detail::split_commas(lines[r]);
    if (cells.size() != header.size())
      return fail(row, "", "expected " + std::to_string(header.size()) + " cells, found " +
                               std::to_string(cells.size()));
    for (std::size_t j = 0; j < d; ++j) {
      if (cells[j].empty()) return fail(row, ds.feature_names[j], "empty cell");
      auto v = detail::parse_real(cells[j]);
      if (!v) return fail(row, ds.feature_names[j], "non-numeric value '" + std::string(cells[j]) + "'");
      values.push_back(*v);
    }
    const std::string_view label = cells.back();
    if (label.empty()) return fail(row, label_column, "empty cell");
    auto [it, inserted] = class_index.try_emplace(label, static_cast<int>(ds.class_names.size()));
    if (inserted) ds.class_names.emplace_back(label);
    ds.y.push_back(it->second);
  }

  const std::size_t n = ds.y.size();
  if (n < 2) return fail(0, "", "need at least 2 data rows, found " + std::to_string(n));
  if (ds.class_names.size() < 2)
    return fail(0, label_column, "need at least 2 distinct classes, found " + std::to_string(ds.class_names.size()));

  ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * d + j];
  ds.fingerprint = std::hash<std::string_view>{}(text);
  return ds;
}

inline Dataset read_dataset_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DatasetFormatError(Diagnostic{path.filename().string(), 0, "", "cannot open file"});
  std::ostringstream buf;
  buf << in.rdbuf();
  Dataset ds = parse_dataset_csv(buf.str(), path.stem().string(), path.filename().string());
  ds.source_path = path;
  return ds;
}

inline void write_dataset_csv(const Dataset& ds, std::ostream& out) {
  for (const auto& f : ds.feature_names) out << f << ',';
  out << ds.label_name << '\n';
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    for (std::size_t j = 0; j < ds.n_features(); ++j)
      out << detail::format_real(ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << ',';
    out << ds.class_names[static_cast<std::size_t>(ds.y[i])] << '\n';
  }
}

inline void write_dataset_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  write_dataset_csv(ds, out);
}

struct ScanResult {
  std::vector<DatasetSummary> summaries;  // ordered by id
  std::vector<Diagnostic> diagnostics;    // ordered by file name
};

/// Parses every `*.csv` directly inside `dir`. Bad files become diagnostics.
inline ScanResult scan_folder(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec))
    throw ConfigError("datasets folder '" + dir.string() + "' does not exist or is not a directory");

  std::vector<std::filesystem::path> files;
  for (std::filesystem::directory_iterator it(dir, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->path().extension() == ".csv" && it->is_regular_file(ec)) files.push_back(it->path());
  }
  if (ec) throw ConfigError("cannot read datasets folder '" + dir.string() + "': " + ec.message());
  std::sort(files.begin(), files.end(),
            [](const auto& a, const auto& b) { return a.stem().string() < b.stem().string(); });

  ScanResult out;
  for (const auto& f : files) {
    try {
      out.summaries.push_back(summarize(read_dataset_csv(f)));
    } catch (const DatasetFormatError& e) {
      out.diagnostics.push_back(e.diagnostic());
    }
  }
  return out;
}

/// Catalog over a watched folder. Readers and `refresh` are serialized with a
/// shared mutex, so a reader sees either the old or the new catalog.
class DatasetStore {
public:
  explicit DatasetStore(std::filesystem::path dir) : dir_(std::move(dir)) { refresh(); }

  const std::filesystem::path& directory() const noexcept { return dir_; }

  ScanResult refresh() {
    ScanResult scan = scan_folder(dir_);
    std::unique_lock lock(mutex_);
    catalog_ = scan;
    return scan;
  }

  std::vector<DatasetSummary> summaries() const {
    std::shared_lock lock(mutex_);
    return catalog_.summaries;
  }

  std::vector<Diagnostic> diagnostics() const {
    std::shared_lock lock(mutex_);
    return catalog_.diagnostics;
  }

  bool contains(std::string_view id) const {
    std::shared_lock lock(mutex_);
    return find_locked(id) != nullptr;
  }

  /// Re-reads the file, so a file broken since the last scan is reported as a
  /// validation error rather than served stale.
  Dataset load(std::string_view id) const {
    std::filesystem::path path;
    {
      std::shared_lock lock(mutex_);
      if (find_locked(id) == nullptr) throw NotFoundError("unknown dataset '" + std::string(id) + "'");
      path = dir_ / (std::string(id) + ".csv");
    }
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
      throw NotFoundError("dataset '" + std::string(id) + "' is no longer present in the datasets folder");
    return read_dataset_csv(path);
  }

private:
  const DatasetSummary* find_locked(std::string_view id) const {
    auto it = std::lower_bound(catalog_.summaries.begin(), catalog_.summaries.end(), id,
                               [](const DatasetSummary& s, std::string_view key) { return s.id < key; });
    return (it != catalog_.summaries.end() && it->id == id) ? &*it : nullptr;
  }

  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  ScanResult catalog_;
};

}  // namespace uncmap

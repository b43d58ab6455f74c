#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "spc/core.hpp"
#include "spc/evaluation.hpp"
#include "spc/scheduler.hpp"

namespace spc {

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------- CSV

namespace detail {

inline bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  while (last != first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last && first != last;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i)
    if (i == line.size() || line[i] == ',') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  return fields;
}

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Comma-separated numeric matrix; a non-numeric first row is taken as a
/// header and skipped. Ragged rows and non-numeric cells are errors.
inline DataMatrix parse_csv(const std::string& text) {
  std::vector<double> values;
  std::size_t cols = 0, rows = 0;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (!detail::parse_double(fields[i], row[i])) {
        numeric = false;
        break;
      }
    if (!numeric) {
      if (rows == 0 && cols == 0) continue;  // header row
      throw DataError("csv: non-numeric cell at line " + std::to_string(lineno));
    }
    if (cols == 0) cols = fields.size();
    if (fields.size() != cols)
      throw DataError("csv: ragged row at line " + std::to_string(lineno));
    values.insert(values.end(), row.begin(), row.end());
    ++rows;
  }
  if (rows < 2 || cols < 1) throw DataError("csv: need at least 2 rows of data");
  try {
    return make_data(rows, cols, std::move(values));
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("csv: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

inline DataMatrix read_csv(const std::string& path) { return parse_csv(read_file(path)); }

inline std::string to_csv(const DataMatrix& data) {
  std::string out;
  for (std::size_t i = 0; i < data.n; ++i) {
    for (std::size_t m = 0; m < data.p; ++m) {
      if (m) out += ',';
      out += detail::format_double(data(i, m));
    }
    out += '\n';
  }
  return out;
}

/// index,label,is_noise rows (1-based object index, noise rows labeled 0).
inline std::string to_label_csv(const LabeledPartition& part) {
  std::string out = "index,label,is_noise\n";
  for (std::size_t i = 0; i < part.labels.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += std::to_string(part.labels[i]);
    out += ',';
    out += part.is_noise(i) ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline LabeledPartition parse_label_csv(const std::string& text) {
  LabeledPartition part;
  part.noise_label = 0;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != 3)
      throw DataError("label csv: expected 3 columns at line " + std::to_string(lineno));
    double idx, label, noise;
    if (!detail::parse_double(fields[0], idx)) {
      if (lineno == 1) continue;  // header
      throw DataError("label csv: bad row at line " + std::to_string(lineno));
    }
    if (!detail::parse_double(fields[1], label) || !detail::parse_double(fields[2], noise))
      throw DataError("label csv: bad row at line " + std::to_string(lineno));
    part.labels.push_back(noise != 0.0 ? 0 : static_cast<int>(label));
  }
  if (part.labels.empty()) throw DataError("label csv: no rows");
  return part;
}

inline LabeledPartition read_label_csv(const std::string& path) {
  return parse_label_csv(read_file(path));
}

// ---------------------------------------------------------------- misc

/// Per-column standardization to zero mean and unit (n-1) sd; constant
/// columns are centered only.
inline DataMatrix standardize(const DataMatrix& data) {
  const std::vector<double> sd = column_sd(data);
  std::vector<double> mean(data.p, 0.0);
  for (std::size_t m = 0; m < data.p; ++m) {
    for (std::size_t i = 0; i < data.n; ++i) mean[m] += data(i, m);
    mean[m] /= static_cast<double>(data.n);
  }
  DataMatrix out = data;
  for (std::size_t i = 0; i < data.n; ++i)
    for (std::size_t m = 0; m < data.p; ++m) {
      double v = data(i, m) - mean[m];
      if (sd[m] > 0.0) v /= sd[m];
      out.values[i * data.p + m] = v;
    }
  return out;
}

inline std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf);
}

// ---------------------------------------------------------------- path document

/// Serializable record of a whole clustering run: config echo, one record
/// per solution, and the selection block. Schema is versioned; readers
/// reject any other major version.
struct PathDocument {
  static constexpr int kSchemaMajor = 1;
  static constexpr int kSchemaMinor = 0;

  std::size_t n = 0, p = 0;
  std::string data_checksum;
  bool standardized = true;
  PathConfig config;
  bool allow_splits = false;
  int noise_cutoff = 3;
  std::optional<double> timing_seconds;

  struct SolutionRecord {
    double delta = 0.0, lambda = 0.0;
    int k_total = 0, k_clust = 0, iterations = 0, merges = 0;
    bool converged = false, bvr_triggered = false;
    double objective = 0.0, log_likelihood = 0.0;
    std::vector<Vec> centers;
    std::vector<int> assignment;
  };
  std::vector<SolutionRecord> solutions;

  struct SelectionBlock {
    std::size_t chosen_solution = 0;  // index into solutions
    int k_star = 0;
    double a = 0.05;
    std::vector<RatioRecord> ratios;
  };
  std::optional<SelectionBlock> selection;
};

inline std::string to_json(const PathDocument& doc) {
  using json = nlohmann::ordered_json;
  json j;
  j["format"] = "spc-path";
  j["schema_version"] = std::to_string(PathDocument::kSchemaMajor) + "." +
                        std::to_string(PathDocument::kSchemaMinor);
  json meta;
  meta["n"] = doc.n;
  meta["p"] = doc.p;
  meta["data_checksum"] = doc.data_checksum;
  meta["standardized"] = doc.standardized;
  meta["omega"] = doc.config.omega;
  meta["tau"] = doc.config.tau;
  meta["phi"] = doc.config.phi;
  meta["alpha"] = doc.config.alpha;
  meta["grid_size"] = doc.config.grid_size;
  meta["allow_splits"] = doc.allow_splits;
  meta["noise_cutoff"] = doc.noise_cutoff;
  if (doc.timing_seconds) meta["timing_seconds"] = *doc.timing_seconds;
  j["metadata"] = std::move(meta);
  json sols = json::array();
  for (const auto& s : doc.solutions) {
    json r;
    r["delta"] = s.delta;
    r["lambda"] = s.lambda;
    r["k_total"] = s.k_total;
    r["k_clust"] = s.k_clust;
    r["iterations"] = s.iterations;
    r["converged"] = s.converged;
    r["merges"] = s.merges;
    r["bvr_triggered"] = s.bvr_triggered;
    r["objective"] = s.objective;
    r["log_likelihood"] = s.log_likelihood;
    r["centers"] = s.centers;
    r["assignment"] = s.assignment;
    sols.push_back(std::move(r));
  }
  j["solutions"] = std::move(sols);
  if (doc.selection) {
    json sel;
    sel["chosen_solution"] = doc.selection->chosen_solution;
    sel["k_star"] = doc.selection->k_star;
    sel["a"] = doc.selection->a;
    json ratios = json::array();
    for (const auto& r : doc.selection->ratios)
      ratios.push_back({{"k_low", r.k_low}, {"k_high", r.k_high}, {"dr", r.dr}});
    sel["ratios"] = std::move(ratios);
    j["selection"] = std::move(sel);
  }
  return j.dump(2) + "\n";
}

inline PathDocument parse_path_document(const std::string& text) {
  using json = nlohmann::ordered_json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("path document: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "spc-path")
      throw DataError("path document: unrecognized format");
    const std::string ver = j.at("schema_version").get<std::string>();
    const int major = std::stoi(ver.substr(0, ver.find('.')));
    if (major != PathDocument::kSchemaMajor)
      throw DataError("path document: unsupported schema major version " + ver);
    PathDocument doc;
    const json& meta = j.at("metadata");
    doc.n = meta.at("n").get<std::size_t>();
    doc.p = meta.at("p").get<std::size_t>();
    doc.data_checksum = meta.at("data_checksum").get<std::string>();
    doc.standardized = meta.at("standardized").get<bool>();
    doc.config.omega = meta.at("omega").get<double>();
    doc.config.tau = meta.at("tau").get<double>();
    doc.config.phi = meta.at("phi").get<double>();
    doc.config.alpha = meta.at("alpha").get<double>();
    doc.config.grid_size = meta.at("grid_size").get<int>();
    doc.allow_splits = meta.at("allow_splits").get<bool>();
    doc.noise_cutoff = meta.at("noise_cutoff").get<int>();
    if (meta.contains("timing_seconds"))
      doc.timing_seconds = meta.at("timing_seconds").get<double>();
    for (const json& r : j.at("solutions")) {
      PathDocument::SolutionRecord s;
      s.delta = r.at("delta").get<double>();
      s.lambda = r.at("lambda").get<double>();
      s.k_total = r.at("k_total").get<int>();
      s.k_clust = r.at("k_clust").get<int>();
      s.iterations = r.at("iterations").get<int>();
      s.converged = r.at("converged").get<bool>();
      s.merges = r.at("merges").get<int>();
      s.bvr_triggered = r.at("bvr_triggered").get<bool>();
      s.objective = r.at("objective").get<double>();
      s.log_likelihood = r.at("log_likelihood").get<double>();
      s.centers = r.at("centers").get<std::vector<Vec>>();
      s.assignment = r.at("assignment").get<std::vector<int>>();
      if (s.assignment.size() != doc.n)
        throw DataError("path document: assignment length mismatch");
      doc.solutions.push_back(std::move(s));
    }
    if (j.contains("selection")) {
      PathDocument::SelectionBlock sel;
      const json& js = j.at("selection");
      sel.chosen_solution = js.at("chosen_solution").get<std::size_t>();
      sel.k_star = js.at("k_star").get<int>();
      sel.a = js.at("a").get<double>();
      for (const json& r : js.at("ratios"))
        sel.ratios.push_back({r.at("k_low").get<int>(), r.at("k_high").get<int>(),
                              r.at("dr").get<double>()});
      doc.selection = std::move(sel);
    }
    return doc;
  } catch (const json::exception& e) {
    throw DataError(std::string("path document: ") + e.what());
  }
}

}  // namespace spc

// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spl/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace spl {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Primitives

std::string format_double(double value) {
  if (!std::isfinite(value)) fail(ErrorKind::InvalidArgument, "cannot serialize a non-finite number");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

namespace {

bool is_scalar(const Json& v) { return !v.is_array() && !v.is_object(); }

void emit(std::string& out, const Json& v, int indent, int depth) {
  const auto newline = [&](int d) {
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (v.type()) {
    case Json::value_t::null: out += "null"; return;
    case Json::value_t::boolean: out += v.get<bool>() ? "true" : "false"; return;
    case Json::value_t::number_integer: out += std::to_string(v.get<std::int64_t>()); return;
    case Json::value_t::number_unsigned: out += std::to_string(v.get<std::uint64_t>()); return;
    case Json::value_t::number_float: out += format_double(v.get<double>()); return;
    case Json::value_t::string: out += v.dump(); return;
    case Json::value_t::array: {
      out += '[';
      const bool inline_items = indent < 0 || std::all_of(v.begin(), v.end(), is_scalar);
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += inline_items && indent >= 0 ? ", " : ",";
        first = false;
        if (!inline_items) newline(depth + 1);
        emit(out, item, indent, depth + 1);
      }
      if (!inline_items && !v.empty()) newline(depth);
      out += ']';
      return;
    }
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ',';
        first = false;
        if (indent >= 0) newline(depth + 1);
        out += Json(it.key()).dump();
        out += indent >= 0 ? ": " : ":";
        emit(out, it.value(), indent, depth + 1);
      }
      if (indent >= 0 && !v.empty()) newline(depth);
      out += '}';
      return;
    }
    default:
      fail(ErrorKind::Internal, "unsupported JSON value type");
  }
}

[[noreturn]] void format_error(std::string_view source, const std::string& what) {
  fail(ErrorKind::FormatError, std::string(source) + ": " + what);
}

void check_keys(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view context) {
  if (!j.is_object()) fail(ErrorKind::FormatError, std::string(context) + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      fail(ErrorKind::FormatError, std::string(context) + ": unknown field '" + it.key() + "'");
    }
  }
}

const Json& require(const Json& j, const char* key, std::string_view context) {
  if (!j.is_object() || !j.contains(key)) {
    fail(ErrorKind::FormatError, std::string(context) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

ClassId to_class_id(const Json& v, const char* field) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() > 0xffffffffLL) {
    fail(ErrorKind::FormatError, std::string(field) + " must be a non-negative integer");
  }
  return static_cast<ClassId>(v.get<std::int64_t>());
}

std::uint64_t to_u64(const Json& v, const char* field) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  fail(ErrorKind::FormatError, std::string(field) + " must be a non-negative integer");
}

double to_double(const Json& v, const char* field) {
  if (!v.is_number()) fail(ErrorKind::FormatError, std::string(field) + " must be a number");
  return v.get<double>();
}

std::optional<ClassId> optional_class(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return to_class_id(j.at(key), key);
}

Json doubles(std::span<const double> values) {
  Json arr = Json::array();
  for (const double v : values) arr.push_back(v);
  return arr;
}

Json matrix_rows(std::span<const double> values, std::size_t rows, std::size_t cols) {
  Json arr = Json::array();
  for (std::size_t r = 0; r < rows; ++r) arr.push_back(doubles(values.subspan(r * cols, cols)));
  return arr;
}

// Flattens [[...], ...] into out, checking the shape.
void read_matrix(const Json& j, std::size_t rows, std::size_t cols, const char* field, std::vector<double>& out) {
  if (!j.is_array() || j.size() != rows) {
    fail(ErrorKind::FormatError, std::string(field) + " must have " + std::to_string(rows) + " rows");
  }
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) {
      fail(ErrorKind::FormatError, std::string(field) + " rows must have " + std::to_string(cols) + " entries");
    }
    for (const auto& v : row) out.push_back(to_double(v, field));
  }
}

void read_vector(const Json& j, std::size_t size, const char* field, std::vector<double>& out) {
  if (!j.is_array() || j.size() != size) {
    fail(ErrorKind::FormatError, std::string(field) + " must have " + std::to_string(size) + " entries");
  }
  for (const auto& v : j) out.push_back(to_double(v, field));
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  s = trim(s);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::string out;
  emit(out, value, indent, 0);
  return out;
}

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    format_error(source, e.what());
  }
}

void rethrow_as_format_error(std::string_view source) {
  try {
    throw;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::InvalidSpec ||
        e.kind() == ErrorKind::DimensionMismatch) {
      format_error(source, e.what());
    }
    throw Error(e.kind(), std::string(source) + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    format_error(source, e.what());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::FileNotFound, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::FileNotFound, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorKind::Internal, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Records

Json record_to_json(const ClipRecord& r) {
  Json j = Json::object();
  j["clip_id"] = r.clip_id;
  j["video_id"] = r.video_id;
  j["weak_label"] = r.weak_label;
  j["features"] = doubles(r.features);
  if (r.true_label) j["true_label"] = *r.true_label;
  if (r.teacher_pred) j["teacher_pred"] = *r.teacher_pred;
  if (r.pseudo_label) j["pseudo_label"] = *r.pseudo_label;
  return j;
}

ClipRecord record_from_json(const Json& j) {
  check_keys(j, {"clip_id", "video_id", "weak_label", "features", "true_label", "teacher_pred", "pseudo_label"},
             "record");
  ClipRecord r;
  const Json& id = require(j, "clip_id", "record");
  if (!id.is_string()) fail(ErrorKind::FormatError, "clip_id must be a string");
  r.clip_id = id.get<std::string>();
  const Json& video = require(j, "video_id", "record");
  if (!video.is_string()) fail(ErrorKind::FormatError, "video_id must be a string");
  r.video_id = video.get<std::string>();
  r.weak_label = to_class_id(require(j, "weak_label", "record"), "weak_label");
  const Json& features = require(j, "features", "record");
  if (!features.is_array()) fail(ErrorKind::FormatError, "features must be an array");
  r.features.reserve(features.size());
  for (const auto& v : features) r.features.push_back(to_double(v, "features"));
  r.true_label = optional_class(j, "true_label");
  r.teacher_pred = optional_class(j, "teacher_pred");
  r.pseudo_label = optional_class(j, "pseudo_label");
  return r;
}

std::string records_to_jsonl(std::span<const ClipRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += dump_json(record_to_json(r));
    out += '\n';
  }
  return out;
}

RecordSet records_from_jsonl(std::string_view text, std::string_view source) {
  RecordSet out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  std::size_t dim = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no);
    try {
      out.push_back(record_from_json(Json::parse(line.begin(), line.end())));
    } catch (...) {
      rethrow_as_format_error(where);
    }
    if (out.size() == 1) dim = out.back().features.size();
    if (out.back().features.size() != dim) {
      format_error(where, "record has " + std::to_string(out.back().features.size()) + " features, expected " +
                              std::to_string(dim));
    }
  }
  return out;
}

RecordSet load_records(const fs::path& path) { return records_from_jsonl(read_text(path), path.string()); }

void save_records(const fs::path& path, std::span<const ClipRecord> records) {
  write_text(path, records_to_jsonl(records));
}

// ---------------------------------------------------------------------------
// Confusion CSV

std::string confusion_to_csv(const ConfusionMatrix& c) {
  std::string out;
  const std::size_t n = c.size();
  for (std::size_t col = 0; col < n; ++col) {
    if (col) out += ',';
    out += std::to_string(col);
  }
  out += '\n';
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < n; ++col) {
      if (col) out += ',';
      out += std::to_string(c.at(row, col));
    }
    out += '\n';
  }
  return out;
}

ConfusionMatrix confusion_from_csv(std::string_view text, std::string_view source) {
  std::vector<std::string_view> lines;
  for (auto line : split(text, '\n')) lines.push_back(trim(line));
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) format_error(source, "empty confusion CSV");
  const auto header = split(lines[0], ',');
  const std::size_t n = header.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = parse_u64(header[i]);
    if (!id || *id != i) format_error(std::string(source) + ":1", "header must list class ids 0..N-1");
  }
  if (n < 2) format_error(std::string(source) + ":1", "confusion matrix needs N >= 2");
  if (lines.size() != n + 1) {
    format_error(source, "expected " + std::to_string(n) + " data rows, found " + std::to_string(lines.size() - 1));
  }
  std::vector<std::uint64_t> counts;
  counts.reserve(n * n);
  for (std::size_t row = 0; row < n; ++row) {
    const std::string where = std::string(source) + ":" + std::to_string(row + 2);
    const auto cells = split(lines[row + 1], ',');
    if (cells.size() != n) format_error(where, "expected " + std::to_string(n) + " columns");
    for (const auto cell : cells) {
      const auto v = parse_u64(cell);
      if (!v) format_error(where, "counts must be non-negative integers");
      counts.push_back(*v);
    }
  }
  return ConfusionMatrix(ClassCount(n), std::move(counts));
}

// ---------------------------------------------------------------------------
// Label space

Json label_space_to_json(const SplLabelSpace& space) {
  Json j = Json::object();
  j["strategy"] = std::string(strategy_name(space.strategy().kind));
  j["k"] = space.strategy().k ? Json(*space.strategy().k) : Json(nullptr);
  j["n"] = space.n().value();
  j["num_classes"] = space.num_classes();
  j["scr"] = space.scr();
  Json cells = Json::array();
  const std::size_t n = space.n().value();
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t col = 0; col < n; ++col) {
      Json cell = Json::object();
      cell["row"] = row;
      cell["col"] = col;
      const auto cls = space.class_of(row, col);
      cell["class"] = cls ? Json(*cls) : Json("discard");
      cell["count"] = space.cell_count(row, col);
      cells.push_back(std::move(cell));
    }
  }
  j["cells"] = std::move(cells);
  return j;
}

SplLabelSpace label_space_from_json(const Json& j) {
  check_keys(j, {"strategy", "k", "n", "num_classes", "scr", "cells"}, "label space");
  const Json& strategy_j = require(j, "strategy", "label space");
  if (!strategy_j.is_string()) fail(ErrorKind::FormatError, "label space: strategy must be a string");
  StrategyConfig strategy;
  try {
    strategy.kind = parse_strategy(strategy_j.get<std::string>());
  } catch (const Error& e) {
    fail(ErrorKind::FormatError, std::string("label space: ") + e.what());
  }
  if (j.contains("k") && !j.at("k").is_null()) strategy.k = to_u64(j.at("k"), "k");
  const std::size_t n = to_u64(require(j, "n", "label space"), "n");
  if (n < 2) fail(ErrorKind::FormatError, "label space: n must be >= 2");
  const std::size_t num_classes = to_u64(require(j, "num_classes", "label space"), "num_classes");
  const double scr = to_double(require(j, "scr", "label space"), "scr");

  const Json& cells = require(j, "cells", "label space");
  if (!cells.is_array() || cells.size() != n * n) {
    fail(ErrorKind::FormatError, "label space: cells must list all " + std::to_string(n * n) + " cells");
  }
  std::vector<std::optional<ClassId>> cell_to_class(n * n);
  std::vector<std::uint64_t> counts(n * n, 0);
  std::vector<bool> seen(n * n, false);
  for (const auto& cell : cells) {
    check_keys(cell, {"row", "col", "class", "count"}, "label space cell");
    const std::size_t row = to_u64(require(cell, "row", "cell"), "row");
    const std::size_t col = to_u64(require(cell, "col", "cell"), "col");
    if (row >= n || col >= n) fail(ErrorKind::FormatError, "label space: cell index out of range");
    const std::size_t idx = row * n + col;
    if (seen[idx]) fail(ErrorKind::FormatError, "label space: duplicate cell");
    seen[idx] = true;
    const Json& cls = require(cell, "class", "cell");
    if (cls.is_string()) {
      if (cls.get<std::string>() != "discard") fail(ErrorKind::FormatError, "label space: class must be an id or \"discard\"");
    } else {
      cell_to_class[idx] = to_class_id(cls, "class");
    }
    counts[idx] = to_u64(require(cell, "count", "cell"), "count");
  }
  try {
    SplLabelSpace space(strategy, ClassCount(n), num_classes, std::move(cell_to_class), std::move(counts));
    if (std::abs(space.scr() - scr) > 1e-12) {
      fail(ErrorKind::FormatError, "label space: scr does not match cell counts");
    }
    return space;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::FormatError) throw;
    fail(ErrorKind::FormatError, std::string("label space: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Checkpoints

Json train_config_to_json(const TrainConfig& cfg) {
  Json j = Json::object();
  j["learning_rate"] = cfg.learning_rate;
  j["epochs"] = cfg.epochs;
  j["batch_size"] = cfg.batch_size;
  j["seed"] = cfg.seed;
  j["shuffle"] = cfg.shuffle;
  return j;
}

TrainConfig train_config_from_json(const Json& j, const TrainConfig& defaults) {
  check_keys(j, {"learning_rate", "epochs", "batch_size", "seed", "shuffle"}, "train_config");
  TrainConfig cfg = defaults;
  if (j.contains("learning_rate")) cfg.learning_rate = to_double(j.at("learning_rate"), "learning_rate");
  if (j.contains("epochs")) cfg.epochs = to_u64(j.at("epochs"), "epochs");
  if (j.contains("batch_size")) cfg.batch_size = to_u64(j.at("batch_size"), "batch_size");
  if (j.contains("seed")) cfg.seed = to_u64(j.at("seed"), "seed");
  if (j.contains("shuffle")) {
    if (!j.at("shuffle").is_boolean()) fail(ErrorKind::FormatError, "shuffle must be a boolean");
    cfg.shuffle = j.at("shuffle").get<bool>();
  }
  try {
    cfg.validate();
  } catch (const Error& e) {
    fail(ErrorKind::FormatError, std::string("train_config: ") + e.what());
  }
  return cfg;
}

Json checkpoint_to_json(const Checkpoint& ckpt) {
  Json j = Json::object();
  Json dims = Json::object();
  Json params = Json::object();
  if (const auto* lin = std::get_if<LinearSoftmaxModel>(&ckpt.model)) {
    j["model_kind"] = "linear_softmax";
    dims["num_classes"] = lin->num_classes();
    dims["feature_dim"] = lin->feature_dim();
    params["weights"] = matrix_rows(lin->weights(), lin->num_classes(), lin->feature_dim());
    params["biases"] = doubles(lin->biases());
  } else {
    const auto& mlp = std::get<MlpModel>(ckpt.model);
    j["model_kind"] = "mlp_tanh";
    dims["num_classes"] = mlp.num_classes();
    dims["feature_dim"] = mlp.feature_dim();
    dims["hidden_width"] = mlp.hidden_width();
    params["hidden_weights"] = matrix_rows(mlp.hidden_weights(), mlp.hidden_width(), mlp.feature_dim());
    params["hidden_biases"] = doubles(mlp.hidden_biases());
    params["head_weights"] = matrix_rows(mlp.head_weights(), mlp.num_classes(), mlp.hidden_width());
    params["head_biases"] = doubles(mlp.head_biases());
  }
  j["dims"] = std::move(dims);
  j["parameters"] = std::move(params);
  j["seed"] = ckpt.seed;
  j["train_config"] = train_config_to_json(ckpt.train_config);
  return j;
}

Checkpoint checkpoint_from_json(const Json& j) {
  check_keys(j, {"model_kind", "dims", "parameters", "seed", "train_config"}, "checkpoint");
  const Json& kind = require(j, "model_kind", "checkpoint");
  const Json& dims = require(j, "dims", "checkpoint");
  const Json& params = require(j, "parameters", "checkpoint");
  const std::size_t classes = to_u64(require(dims, "num_classes", "dims"), "num_classes");
  const std::size_t dim = to_u64(require(dims, "feature_dim", "dims"), "feature_dim");
  std::vector<double> flat;
  auto build = [&]() -> std::variant<LinearSoftmaxModel, MlpModel> {
    if (kind == "linear_softmax") {
      check_keys(dims, {"num_classes", "feature_dim"}, "dims");
      check_keys(params, {"weights", "biases"}, "parameters");
      LinearSoftmaxModel m(classes, dim);
      read_matrix(require(params, "weights", "parameters"), classes, dim, "weights", flat);
      read_vector(require(params, "biases", "parameters"), classes, "biases", flat);
      std::copy(flat.begin(), flat.end(), m.parameters().begin());
      return m;
    }
    if (kind == "mlp_tanh") {
      check_keys(dims, {"num_classes", "feature_dim", "hidden_width"}, "dims");
      check_keys(params, {"hidden_weights", "hidden_biases", "head_weights", "head_biases"}, "parameters");
      const std::size_t hidden = to_u64(require(dims, "hidden_width", "dims"), "hidden_width");
      MlpModel m(classes, dim, hidden);
      read_matrix(require(params, "hidden_weights", "parameters"), hidden, dim, "hidden_weights", flat);
      read_vector(require(params, "hidden_biases", "parameters"), hidden, "hidden_biases", flat);
      read_matrix(require(params, "head_weights", "parameters"), classes, hidden, "head_weights", flat);
      read_vector(require(params, "head_biases", "parameters"), classes, "head_biases", flat);
      std::copy(flat.begin(), flat.end(), m.parameters().begin());
      return m;
    }
    fail(ErrorKind::FormatError, "checkpoint: unknown model_kind");
  };
  Checkpoint ckpt{build(), 0, {}};
  ckpt.seed = to_u64(require(j, "seed", "checkpoint"), "seed");
  ckpt.train_config = train_config_from_json(require(j, "train_config", "checkpoint"));
  return ckpt;
}

// ---------------------------------------------------------------------------
// Specs

Json corpus_spec_to_json(const CorpusSpec& spec) {
  Json j = Json::object();
  j["n"] = spec.n;
  j["feature_dim"] = spec.feature_dim;
  j["videos_per_class"] = spec.videos_per_class;
  j["clips_per_video"] = spec.clips_per_video;
  j["temporal_noise_p"] = spec.temporal_noise_p;
  j["relatedness"] = spec.relatedness.values.empty()
                         ? Json(nullptr)
                         : matrix_rows(spec.relatedness.values, spec.relatedness.rows, spec.relatedness.cols);
  j["prototype_separation"] = spec.prototype_separation;
  j["noise_std"] = spec.noise_std;
  j["prototype_seed"] = spec.prototype_seed;
  j["seed"] = spec.seed;
  j["background_mode"] = spec.background_mode;
  j["background_noise_p"] = spec.background_noise_p;
  return j;
}

CorpusSpec corpus_spec_from_json(const Json& j, const CorpusSpec& defaults) {
  check_keys(j, {"n", "feature_dim", "videos_per_class", "clips_per_video", "temporal_noise_p", "relatedness",
                 "prototype_separation", "noise_std", "prototype_seed", "seed", "background_mode",
                 "background_noise_p"},
             "corpus spec");
  CorpusSpec s = defaults;
  if (j.contains("n")) s.n = to_u64(j.at("n"), "n");
  if (j.contains("feature_dim")) s.feature_dim = to_u64(j.at("feature_dim"), "feature_dim");
  if (j.contains("videos_per_class")) s.videos_per_class = to_u64(j.at("videos_per_class"), "videos_per_class");
  if (j.contains("clips_per_video")) s.clips_per_video = to_u64(j.at("clips_per_video"), "clips_per_video");
  if (j.contains("temporal_noise_p")) s.temporal_noise_p = to_double(j.at("temporal_noise_p"), "temporal_noise_p");
  if (j.contains("relatedness")) {
    s.relatedness = {};
    if (!j.at("relatedness").is_null()) {
      const Json& rel = j.at("relatedness");
      const std::size_t rows = rel.is_array() ? rel.size() : 0;
      s.relatedness.rows = rows;
      s.relatedness.cols = rows;
      read_matrix(rel, rows, rows, "relatedness", s.relatedness.values);
    }
  }
  if (j.contains("prototype_separation")) {
    s.prototype_separation = to_double(j.at("prototype_separation"), "prototype_separation");
  }
  if (j.contains("noise_std")) s.noise_std = to_double(j.at("noise_std"), "noise_std");
  if (j.contains("prototype_seed")) s.prototype_seed = to_u64(j.at("prototype_seed"), "prototype_seed");
  if (j.contains("seed")) s.seed = to_u64(j.at("seed"), "seed");
  if (j.contains("background_mode")) {
    if (!j.at("background_mode").is_boolean()) fail(ErrorKind::FormatError, "background_mode must be a boolean");
    s.background_mode = j.at("background_mode").get<bool>();
  }
  if (j.contains("background_noise_p")) {
    s.background_noise_p = to_double(j.at("background_noise_p"), "background_noise_p");
  }
  return s;
}

Json target_spec_to_json(const TargetSpec& spec) {
  Json j = Json::object();
  j["n"] = spec.n;
  j["feature_dim"] = spec.feature_dim;
  j["clips_per_class"] = spec.clips_per_class;
  j["prototype_separation"] = spec.prototype_separation;
  j["noise_std"] = spec.noise_std;
  j["prototype_seed"] = spec.prototype_seed;
  j["seed"] = spec.seed;
  j["id_prefix"] = spec.id_prefix;
  return j;
}

// ---------------------------------------------------------------------------
// Reports

Json eval_report_to_json(const EvalReport& report) {
  Json j = Json::object();
  j["top1"] = report.top1;
  j["top5"] = report.top5 ? Json(*report.top5) : Json(nullptr);
  j["num_samples"] = report.num_samples;
  j["per_class_accuracy"] = doubles(report.per_class_accuracy);
  j["per_class_support"] = report.per_class_support;
  return j;
}

Json class_distribution_to_json(const ClassDistribution& dist) {
  Json j = Json::object();
  j["total"] = dist.total;
  j["num_classes"] = dist.class_counts.size();
  j["median"] = dist.median;
  j["head_classes"] = dist.head_classes;
  j["tail_classes"] = dist.tail_classes;
  j["diagonal_mass"] = dist.diagonal_mass;
  j["off_diagonal_mass"] = dist.off_diagonal_mass;
  j["empty_classes"] = dist.empty_classes;
  j["class_counts"] = dist.class_counts;
  return j;
}

std::string class_distribution_to_csv(const ClassDistribution& dist) {
  std::string out = "class_id,count\n";
  for (std::size_t c = 0; c < dist.class_counts.size(); ++c) {
    out += std::to_string(c) + "," + std::to_string(dist.class_counts[c]) + "\n";
  }
  return out;
}

}  // namespace spl

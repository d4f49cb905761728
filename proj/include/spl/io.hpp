// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include <json.hpp>

#include "spl/confusion.hpp"
#include "spl/corpus.hpp"
#include "spl/label_space.hpp"
#include "spl/metrics.hpp"
#include "spl/model.hpp"
#include "spl/record.hpp"
#include "spl/train.hpp"

namespace spl {

using Json = nlohmann::ordered_json;

// --- Serialization primitives ------------------------------------------------

/// %.17g. Throws InvalidArgument for NaN or infinity.
std::string format_double(double value);

/// JSON text with every floating-point number written at 17 significant
/// digits. indent < 0 gives a single line.
std::string dump_json(const Json& value, int indent = -1);
Json parse_json(std::string_view text, std::string_view source);

/// Reads a whole file; throws FileNotFound.
std::string read_text(const std::filesystem::path& path);
/// Writes a whole file, creating parent directories.
void write_text(const std::filesystem::path& path, std::string_view content);

// --- Records (JSON lines) ----------------------------------------------------

/// Field order: clip_id, video_id, weak_label, features, true_label,
/// teacher_pred, pseudo_label. Absent optionals are omitted.
Json record_to_json(const ClipRecord& r);
ClipRecord record_from_json(const Json& j);

std::string records_to_jsonl(std::span<const ClipRecord> records);
/// Throws FormatError("<source>:<line>: ...").
RecordSet records_from_jsonl(std::string_view text, std::string_view source);
RecordSet load_records(const std::filesystem::path& path);
void save_records(const std::filesystem::path& path, std::span<const ClipRecord> records);

// --- Confusion matrix (CSV) --------------------------------------------------

/// Header row "0,1,...,N-1", then N rows of N integer counts.
std::string confusion_to_csv(const ConfusionMatrix& c);
ConfusionMatrix confusion_from_csv(std::string_view text, std::string_view source);

// --- Label space (JSON) ------------------------------------------------------

/// {strategy, k, n, num_classes, scr, cells: [{row, col, class|"discard", count}]}
Json label_space_to_json(const SplLabelSpace& space);
SplLabelSpace label_space_from_json(const Json& j);

// --- Model checkpoints -------------------------------------------------------

struct Checkpoint {
  std::variant<LinearSoftmaxModel, MlpModel> model;
  std::uint64_t seed = 0;
  TrainConfig train_config;
};

/// {model_kind, dims, parameters, seed, train_config}. model_kind is
/// "linear_softmax" or "mlp_tanh"; parameters are nested arrays.
Json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const Json& j);

Json train_config_to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const Json& j, const TrainConfig& defaults = {});

// --- Corpus specs ------------------------------------------------------------

Json corpus_spec_to_json(const CorpusSpec& spec);
CorpusSpec corpus_spec_from_json(const Json& j, const CorpusSpec& defaults = {});
Json target_spec_to_json(const TargetSpec& spec);

// --- Reports -----------------------------------------------------------------

Json eval_report_to_json(const EvalReport& report);
Json class_distribution_to_json(const ClassDistribution& dist);
/// "class_id,count" rows.
std::string class_distribution_to_csv(const ClassDistribution& dist);

/// Wraps a JSON access error as FormatError naming the source.
[[noreturn]] void rethrow_as_format_error(std::string_view source);

}  // namespace spl

// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spl/confusion.hpp"
#include "spl/corpus.hpp"
#include "spl/io.hpp"
#include "spl/label_space.hpp"
#include "spl/metrics.hpp"
#include "spl/model.hpp"
#include "spl/train.hpp"

namespace spl {

/// Every stochastic stage draws from its own stream derived from the run
/// seed, so a stage can be rerun in isolation (e.g. from the CLI) and
/// reproduce the monolithic run.
enum class Stage { Prototypes, Target, Web, Eval, Teacher, Pretrain, SwapHead, Finetune };

std::uint64_t stage_seed(std::uint64_t run_seed, Stage stage);

struct ExperimentConfig {
  /// Web corpus parameters. Its seed and prototype_seed are replaced by
  /// stage seeds on every run.
  CorpusSpec corpus;
  std::size_t target_clips_per_class = 100;
  std::size_t eval_clips_per_class = 100;
  std::size_t hidden_width = kDefaultHiddenWidth;
  /// Arm used by run_experiment().
  StrategyConfig strategy{StrategyKind::SplB, std::nullopt};
  /// Arms used by compare_strategies() when none are passed explicitly.
  std::vector<StrategyConfig> strategies;
  bool include_no_pretrain = true;
  /// Train configs; their seed fields are replaced by stage seeds.
  TrainConfig teacher_cfg;
  TrainConfig pretrain_cfg;
  TrainConfig finetune_cfg;
  /// Class excluded from the reported mAP.
  std::optional<ClassId> background_class;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

  ClassCount n() const { return ClassCount(corpus.n); }
  /// Throws InvalidArgument / InvalidSpec / Budget* errors.
  void validate() const;
};

/// Default desk-scale benchmark: N=10, d=16, h=32, 100 videos x 10 clips per
/// class, p=0.5, noise_std = 0.35 x separation, 100 target clips per class,
/// seven strategies plus a no-pretrain arm over seeds 1..5.
ExperimentConfig benchmark_config();

Json experiment_config_to_json(const ExperimentConfig& cfg);
ExperimentConfig experiment_config_from_json(const Json& j, const ExperimentConfig& defaults = benchmark_config());

// Specs for each generated set of one run.
TargetSpec target_spec_for(const ExperimentConfig& cfg, std::uint64_t run_seed);
TargetSpec eval_spec_for(const ExperimentConfig& cfg, std::uint64_t run_seed);
CorpusSpec web_spec_for(const ExperimentConfig& cfg, std::uint64_t run_seed);
TrainConfig with_seed(TrainConfig cfg, std::uint64_t seed);

/// Shared per-seed state: everything before relabeling.
struct Upstream {
  std::uint64_t seed = 0;
  RecordSet target;
  RecordSet eval;
  RecordSet web;  // teacher_pred filled
  LinearSoftmaxModel teacher;
  EvalReport teacher_eval;
  ConfusionMatrix confusion;
};

/// Sets teacher_pred on every record.
RecordSet annotate(std::span<const ClipRecord> records, const LinearSoftmaxModel& teacher);

LinearSoftmaxModel train_teacher(std::span<const ClipRecord> target, std::size_t n, const TrainConfig& cfg);

/// Trains a fresh student on pseudo labels. With an SPL space, head rows are
/// trained in anchor-cell order and mapped back to class ids afterwards, so
/// label spaces that differ only by an id permutation train identically.
MlpModel pretrain_student(std::span<const ClipRecord> relabeled, std::size_t num_classes,
                          const SplLabelSpace* space, std::size_t hidden_width, const TrainConfig& cfg);

/// swap_head to N classes, then fit on the target set.
MlpModel finetune_student(const MlpModel& student, std::span<const ClipRecord> target, std::size_t n,
                          std::uint64_t swap_seed, const TrainConfig& cfg);

Upstream prepare_upstream(const ExperimentConfig& cfg, std::uint64_t seed);

/// Pre-training arm; nullopt is the no-pretrain baseline (student trained
/// from scratch on the target set with the fine-tune budget).
using Arm = std::optional<StrategyConfig>;
std::string arm_label(const Arm& arm);
/// Filesystem-friendly form of arm_label(): "spl-d-k2", "no-pretrain".
std::string arm_slug(const Arm& arm);

struct RunResult {
  std::string arm;
  Arm strategy;
  std::uint64_t seed = 0;
  EvalReport teacher_eval;
  EvalReport final_eval;
  double final_map = 0.0;
  ConfusionMatrix confusion{ClassCount(2)};
  std::size_t num_classes = 0;
  /// SPL strategies only.
  std::optional<double> scr;
  double noise_ratio = 0.0;
  std::size_t pretrain_size = 0;
  /// Milliseconds per stage. Not part of any serialized report.
  std::vector<std::pair<std::string, double>> timings_ms;
};

/// Everything one arm produces, for artifact export.
struct ArmOutputs {
  RunResult result;
  std::optional<SplLabelSpace> space;
  RecordSet relabeled;
  std::optional<MlpModel> pretrained;
  MlpModel student{2, 2, 1};
};

ArmOutputs run_arm(const ExperimentConfig& cfg, const Upstream& up, const Arm& arm);

/// The full flow for cfg.strategy and one seed.
RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed);

struct ArmSummary {
  std::string arm;
  std::size_t runs = 0;
  double top1_mean = 0.0;
  double top1_std = 0.0;
  std::optional<double> top5_mean;
  std::optional<double> top5_std;
  double map_mean = 0.0;
  std::size_t num_classes = 0;
  std::optional<double> scr_mean;
  double pretrain_size_mean = 0.0;
  std::vector<double> top1_by_seed;
};

struct ComparisonTable {
  std::vector<ArmSummary> rows;
  std::vector<RunResult> runs;
};

/// Per seed, one shared upstream; then every arm. The no-pretrain arm leads
/// the table when cfg.include_no_pretrain is set. std is the population
/// standard deviation over seeds. When artifact_dir is given, every run's
/// files are written under it.
ComparisonTable compare_strategies(const ExperimentConfig& cfg, std::span<const StrategyConfig> strategies,
                                   const std::optional<std::filesystem::path>& artifact_dir = std::nullopt);
ComparisonTable compare_strategies(const ExperimentConfig& cfg);

struct SweepRow {
  std::size_t k = 0;
  std::size_t num_classes = 0;
  double scr_mean = 0.0;
  double top1_mean = 0.0;
  double top1_std = 0.0;
  std::vector<RunResult> runs;
};

/// One run per (seed, K), sharing each seed's upstream.
std::vector<SweepRow> sweep_scr(const ExperimentConfig& cfg, StrategyKind kind, std::span<const std::size_t> budgets);

// Reports.
Json run_result_to_json(const RunResult& r);
Json comparison_to_json(const ExperimentConfig& cfg, const ComparisonTable& table);
std::string comparison_to_text(const ComparisonTable& table);
Json sweep_to_json(const ExperimentConfig& cfg, StrategyKind kind, std::span<const SweepRow> rows);
std::string sweep_to_text(StrategyKind kind, std::span<const SweepRow> rows);

/// Writes the corpus-level files of one seed (target.jsonl, eval.jsonl,
/// corpus.jsonl, teacher.json, confusion.csv).
void write_upstream_artifacts(const std::filesystem::path& dir, const ExperimentConfig& cfg, const Upstream& up);
/// labelspace.json (SPL arms), relabeled.jsonl, student.json, report.json,
/// report.txt.
void write_arm_artifacts(const std::filesystem::path& dir, const ExperimentConfig& cfg, const ArmOutputs& out);

/// Text rendering of one run report.
std::string run_result_to_text(const RunResult& r);

}  // namespace spl

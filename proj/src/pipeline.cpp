// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spl/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "spl/dataset.hpp"
#include "spl/relabel.hpp"
#include "spl/rng.hpp"

namespace spl {

namespace fs = std::filesystem;

std::uint64_t stage_seed(std::uint64_t run_seed, Stage stage) {
  switch (stage) {
    case Stage::Prototypes: return derive_seed(run_seed, "prototypes");
    case Stage::Target: return derive_seed(run_seed, "target");
    case Stage::Web: return derive_seed(run_seed, "web");
    case Stage::Eval: return derive_seed(run_seed, "eval");
    case Stage::Teacher: return derive_seed(run_seed, "teacher");
    case Stage::Pretrain: return derive_seed(run_seed, "pretrain");
    case Stage::SwapHead: return derive_seed(run_seed, "swap-head");
    case Stage::Finetune: return derive_seed(run_seed, "finetune");
  }
  return run_seed;
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  corpus.validate();
  if (target_clips_per_class == 0) fail(ErrorKind::InvalidArgument, "target_clips_per_class must be positive");
  if (eval_clips_per_class == 0) fail(ErrorKind::InvalidArgument, "eval_clips_per_class must be positive");
  if (hidden_width == 0) fail(ErrorKind::InvalidArgument, "hidden_width must be positive");
  strategy.validate(n());
  for (const auto& s : strategies) s.validate(n());
  teacher_cfg.validate();
  pretrain_cfg.validate();
  finetune_cfg.validate();
  if (background_class && *background_class >= corpus.n) {
    fail(ErrorKind::InvalidArgument, "background_class outside [0, N-1]");
  }
  if (seeds.empty()) fail(ErrorKind::InvalidArgument, "at least one seed is required");
}

ExperimentConfig benchmark_config() {
  ExperimentConfig cfg;
  cfg.corpus.n = 10;
  cfg.corpus.feature_dim = 16;
  cfg.corpus.videos_per_class = 100;
  cfg.corpus.clips_per_video = 10;
  cfg.corpus.temporal_noise_p = 0.5;
  cfg.corpus.prototype_separation = 2.0;
  cfg.corpus.noise_std = 0.35 * cfg.corpus.prototype_separation;
  cfg.target_clips_per_class = 100;
  cfg.eval_clips_per_class = 100;
  cfg.hidden_width = 32;
  cfg.strategy = {StrategyKind::SplB, std::nullopt};
  cfg.strategies = {
      {StrategyKind::SplFull, std::nullopt},     {StrategyKind::SplM, 2},
      {StrategyKind::SplD, 2},                   {StrategyKind::SplB, std::nullopt},
      {StrategyKind::WeakLabel, std::nullopt},   {StrategyKind::TeacherPred, std::nullopt},
      {StrategyKind::AgreementFilter, std::nullopt},
  };
  cfg.teacher_cfg = {0.1, 30, 16, 0, true};
  cfg.pretrain_cfg = {0.1, 10, 32, 0, true};
  cfg.finetune_cfg = {0.05, 5, 16, 0, true};
  cfg.seeds = {1, 2, 3, 4, 5};
  return cfg;
}

namespace {

Json strategy_to_json(const StrategyConfig& s) {
  Json j = Json::object();
  j["kind"] = std::string(strategy_name(s.kind));
  j["k"] = s.k ? Json(*s.k) : Json(nullptr);
  return j;
}

StrategyConfig strategy_from_json(const Json& j) {
  StrategyConfig s;
  if (j.is_string()) {
    s.kind = parse_strategy(j.get<std::string>());
    return s;
  }
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    fail(ErrorKind::FormatError, "strategy must be a name or {kind, k}");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() != "kind" && it.key() != "k") fail(ErrorKind::FormatError, "strategy: unknown field '" + it.key() + "'");
  }
  s.kind = parse_strategy(j.at("kind").get<std::string>());
  if (j.contains("k") && !j.at("k").is_null()) {
    if (!j.at("k").is_number_unsigned()) fail(ErrorKind::FormatError, "strategy k must be a positive integer");
    s.k = j.at("k").get<std::size_t>();
  }
  return s;
}

Json train_cfg_without_seed(const TrainConfig& cfg) {
  Json j = train_config_to_json(cfg);
  j.erase("seed");
  return j;
}

std::size_t get_size(const Json& j, const char* key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_unsigned()) fail(ErrorKind::FormatError, std::string(key) + " must be a non-negative integer");
  return j.at(key).get<std::size_t>();
}

}  // namespace

Json experiment_config_to_json(const ExperimentConfig& cfg) {
  Json j = Json::object();
  Json corpus = corpus_spec_to_json(cfg.corpus);
  corpus.erase("seed");
  corpus.erase("prototype_seed");
  j["corpus"] = std::move(corpus);
  j["target_clips_per_class"] = cfg.target_clips_per_class;
  j["eval_clips_per_class"] = cfg.eval_clips_per_class;
  j["hidden_width"] = cfg.hidden_width;
  j["strategy"] = strategy_to_json(cfg.strategy);
  Json strategies = Json::array();
  for (const auto& s : cfg.strategies) strategies.push_back(strategy_to_json(s));
  j["strategies"] = std::move(strategies);
  j["include_no_pretrain"] = cfg.include_no_pretrain;
  j["teacher"] = train_cfg_without_seed(cfg.teacher_cfg);
  j["pretrain"] = train_cfg_without_seed(cfg.pretrain_cfg);
  j["finetune"] = train_cfg_without_seed(cfg.finetune_cfg);
  j["background_class"] = cfg.background_class ? Json(*cfg.background_class) : Json(nullptr);
  j["seeds"] = cfg.seeds;
  return j;
}

ExperimentConfig experiment_config_from_json(const Json& j, const ExperimentConfig& defaults) {
  if (!j.is_object()) fail(ErrorKind::FormatError, "experiment config must be a JSON object");
  static const std::vector<std::string> kKeys{
      "corpus",   "target_clips_per_class", "eval_clips_per_class", "hidden_width", "strategy",
      "strategies", "include_no_pretrain",  "teacher",              "pretrain",     "finetune",
      "background_class", "seeds"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(kKeys.begin(), kKeys.end(), it.key()) == kKeys.end()) {
      fail(ErrorKind::FormatError, "experiment config: unknown field '" + it.key() + "'");
    }
  }
  ExperimentConfig cfg = defaults;
  try {
    if (j.contains("corpus")) {
      cfg.corpus = corpus_spec_from_json(j.at("corpus"), defaults.corpus);
      // Keep noise_std tied to separation unless given explicitly.
      if (j.at("corpus").contains("prototype_separation") && !j.at("corpus").contains("noise_std")) {
        cfg.corpus.noise_std = 0.35 * cfg.corpus.prototype_separation;
      }
    }
    cfg.target_clips_per_class = get_size(j, "target_clips_per_class", cfg.target_clips_per_class);
    cfg.eval_clips_per_class = get_size(j, "eval_clips_per_class", cfg.eval_clips_per_class);
    cfg.hidden_width = get_size(j, "hidden_width", cfg.hidden_width);
    if (j.contains("strategy")) cfg.strategy = strategy_from_json(j.at("strategy"));
    if (j.contains("strategies")) {
      if (!j.at("strategies").is_array()) fail(ErrorKind::FormatError, "strategies must be an array");
      cfg.strategies.clear();
      for (const auto& s : j.at("strategies")) cfg.strategies.push_back(strategy_from_json(s));
    }
    if (j.contains("include_no_pretrain")) {
      if (!j.at("include_no_pretrain").is_boolean()) fail(ErrorKind::FormatError, "include_no_pretrain must be a boolean");
      cfg.include_no_pretrain = j.at("include_no_pretrain").get<bool>();
    }
    if (j.contains("teacher")) cfg.teacher_cfg = train_config_from_json(j.at("teacher"), cfg.teacher_cfg);
    if (j.contains("pretrain")) cfg.pretrain_cfg = train_config_from_json(j.at("pretrain"), cfg.pretrain_cfg);
    if (j.contains("finetune")) cfg.finetune_cfg = train_config_from_json(j.at("finetune"), cfg.finetune_cfg);
    if (j.contains("background_class")) {
      const Json& bg = j.at("background_class");
      if (bg.is_null()) {
        cfg.background_class.reset();
      } else if (bg.is_number_unsigned()) {
        cfg.background_class = bg.get<ClassId>();
      } else {
        fail(ErrorKind::FormatError, "background_class must be a class id or null");
      }
    }
    if (j.contains("seeds")) {
      if (!j.at("seeds").is_array()) fail(ErrorKind::FormatError, "seeds must be an array");
      cfg.seeds.clear();
      for (const auto& s : j.at("seeds")) {
        if (!s.is_number_unsigned()) fail(ErrorKind::FormatError, "seeds must be non-negative integers");
        cfg.seeds.push_back(s.get<std::uint64_t>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::FormatError, std::string("experiment config: ") + e.what());
  }
  return cfg;
}

TargetSpec target_spec_for(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  TargetSpec t;
  t.n = cfg.corpus.n;
  t.feature_dim = cfg.corpus.feature_dim;
  t.clips_per_class = cfg.target_clips_per_class;
  t.prototype_separation = cfg.corpus.prototype_separation;
  t.noise_std = cfg.corpus.noise_std;
  t.prototype_seed = stage_seed(run_seed, Stage::Prototypes);
  t.seed = stage_seed(run_seed, Stage::Target);
  t.id_prefix = "target";
  return t;
}

TargetSpec eval_spec_for(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  TargetSpec t = target_spec_for(cfg, run_seed);
  t.clips_per_class = cfg.eval_clips_per_class;
  t.seed = stage_seed(run_seed, Stage::Eval);
  t.id_prefix = "eval";
  return t;
}

CorpusSpec web_spec_for(const ExperimentConfig& cfg, std::uint64_t run_seed) {
  CorpusSpec s = cfg.corpus;
  s.prototype_seed = stage_seed(run_seed, Stage::Prototypes);
  s.seed = stage_seed(run_seed, Stage::Web);
  return s;
}

TrainConfig with_seed(TrainConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  return cfg;
}

// ---------------------------------------------------------------------------
// Stages

RecordSet annotate(std::span<const ClipRecord> records, const LinearSoftmaxModel& teacher) {
  RecordSet out(records.begin(), records.end());
  for (auto& r : out) r.teacher_pred = predict(teacher, r.features).label;
  return out;
}

LinearSoftmaxModel train_teacher(std::span<const ClipRecord> target, std::size_t n, const TrainConfig& cfg) {
  const Dataset data = to_dataset(target, LabelField::Weak);
  return train(LinearSoftmaxModel(n, data.feature_dim), data, cfg);
}

MlpModel pretrain_student(std::span<const ClipRecord> relabeled, std::size_t num_classes,
                          const SplLabelSpace* space, std::size_t hidden_width, const TrainConfig& cfg) {
  Dataset data = to_dataset(relabeled, LabelField::Pseudo);
  if (data.empty()) fail(ErrorKind::EmptyDataset, "no records left for pre-training");

  // canonical[c]: head row used for class c during training.
  std::vector<std::size_t> canonical(num_classes);
  std::iota(canonical.begin(), canonical.end(), std::size_t{0});
  if (space != nullptr) {
    if (space->num_classes() != num_classes) fail(ErrorKind::DimensionMismatch, "label space size mismatch");
    const auto anchors = space->anchor_cells();
    std::vector<std::size_t> by_anchor(num_classes);
    std::iota(by_anchor.begin(), by_anchor.end(), std::size_t{0});
    std::sort(by_anchor.begin(), by_anchor.end(),
              [&](std::size_t a, std::size_t b) { return anchors[a] < anchors[b]; });
    for (std::size_t rank = 0; rank < num_classes; ++rank) canonical[by_anchor[rank]] = rank;
  }
  for (auto& y : data.labels) {
    if (y >= num_classes) fail(ErrorKind::LabelOutOfRange, "pseudo label outside label space");
    y = static_cast<ClassId>(canonical[y]);
  }
  MlpModel trained = train(MlpModel(num_classes, data.feature_dim, hidden_width), data, cfg);
  return trained.with_head_rows(canonical);
}

MlpModel finetune_student(const MlpModel& student, std::span<const ClipRecord> target, std::size_t n,
                          std::uint64_t swap_seed, const TrainConfig& cfg) {
  MlpModel model = swap_head(student, n, swap_seed);
  fit(model, to_dataset(target, LabelField::Weak), cfg);
  return model;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Runs fn, re-tagging library errors with the stage name.
template <typename Fn>
auto staged(const char* stage, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(stage) + ": " + e.what());
  }
}

double final_map(const ScoreMatrix& scores, std::span<const ClipRecord> eval,
                 std::optional<ClassId> background) {
  std::vector<ClassId> labels;
  labels.reserve(eval.size());
  for (const auto& r : eval) labels.push_back(*r.true_label);
  return mean_ap_excluding_background(scores, labels, background);
}

}  // namespace

Upstream prepare_upstream(const ExperimentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::size_t n = cfg.corpus.n;
  auto target = staged("simulate-target", [&] { return generate_target_set(target_spec_for(cfg, seed)); });
  auto teacher = staged("teach", [&] {
    return train_teacher(target.records, n, with_seed(cfg.teacher_cfg, stage_seed(seed, Stage::Teacher)));
  });
  auto eval = staged("simulate-eval", [&] { return generate_target_set(eval_spec_for(cfg, seed)); });
  auto teacher_eval = staged("evaluate-teacher", [&] { return evaluate(teacher, eval.records); });
  auto web = staged("simulate-web", [&] { return generate_web_corpus(web_spec_for(cfg, seed)); });
  auto annotated = staged("infer", [&] { return annotate(web.records, teacher); });
  auto confusion = staged("confusion", [&] { return build_confusion(annotated, cfg.n()); });
  return Upstream{seed,    std::move(target.records), std::move(eval.records), std::move(annotated),
                  teacher, teacher_eval,              std::move(confusion)};
}

std::string arm_label(const Arm& arm) { return arm ? arm->label() : "no-pretrain"; }

std::string arm_slug(const Arm& arm) {
  if (!arm) return "no-pretrain";
  std::string out(strategy_name(arm->kind));
  if (needs_budget(arm->kind) && arm->k) out += "-k" + std::to_string(*arm->k);
  return out;
}

ArmOutputs run_arm(const ExperimentConfig& cfg, const Upstream& up, const Arm& arm) {
  const std::size_t n = cfg.corpus.n;
  ArmOutputs out;
  RunResult& r = out.result;
  r.arm = arm_label(arm);
  r.strategy = arm;
  r.seed = up.seed;
  r.teacher_eval = up.teacher_eval;
  r.confusion = up.confusion;
  r.noise_ratio = noise_ratio(up.confusion);
  r.num_classes = n;

  const TrainConfig finetune_cfg = with_seed(cfg.finetune_cfg, stage_seed(up.seed, Stage::Finetune));
  auto start = Clock::now();
  if (arm) {
    arm->validate(cfg.n());
    if (is_spl(arm->kind)) {
      out.space = staged("labelspace", [&] { return build_label_space(up.confusion, *arm); });
      r.num_classes = out.space->num_classes();
      r.scr = out.space->scr();
    }
    out.relabeled = staged("relabel", [&] {
      return apply_strategy(up.web, *arm, cfg.n(), out.space ? &*out.space : nullptr);
    });
    r.pretrain_size = out.relabeled.size();
    r.timings_ms.emplace_back("relabel", elapsed_ms(start));

    start = Clock::now();
    out.pretrained = staged("pretrain", [&] {
      return pretrain_student(out.relabeled, r.num_classes, out.space ? &*out.space : nullptr, cfg.hidden_width,
                              with_seed(cfg.pretrain_cfg, stage_seed(up.seed, Stage::Pretrain)));
    });
    r.timings_ms.emplace_back("pretrain", elapsed_ms(start));

    start = Clock::now();
    out.student = staged("finetune", [&] {
      return finetune_student(*out.pretrained, up.target, n, stage_seed(up.seed, Stage::SwapHead), finetune_cfg);
    });
  } else {
    out.student = staged("finetune", [&] {
      const Dataset data = to_dataset(up.target, LabelField::Weak);
      return train(MlpModel(n, data.feature_dim, cfg.hidden_width), data, finetune_cfg);
    });
  }
  r.timings_ms.emplace_back("finetune", elapsed_ms(start));

  start = Clock::now();
  staged("evaluate", [&] {
    const ScoreMatrix scores = score_records(out.student, up.eval);
    r.final_eval = evaluate(scores, up.eval);
    r.final_map = final_map(scores, up.eval, cfg.background_class);
    return 0;
  });
  r.timings_ms.emplace_back("evaluate", elapsed_ms(start));
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg, std::uint64_t seed) {
  const Upstream up = prepare_upstream(cfg, seed);
  return run_arm(cfg, up, cfg.strategy).result;
}

// ---------------------------------------------------------------------------
// Multi-seed drivers

namespace {

std::pair<double, double> mean_std(std::span<const double> xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double var = 0.0;
  for (const double x : xs) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

ArmSummary summarize(const std::string& arm, const std::vector<const RunResult*>& runs) {
  ArmSummary s;
  s.arm = arm;
  s.runs = runs.size();
  std::vector<double> top1, top5, maps, scrs, sizes;
  for (const auto* r : runs) {
    top1.push_back(r->final_eval.top1);
    if (r->final_eval.top5) top5.push_back(*r->final_eval.top5);
    maps.push_back(r->final_map);
    if (r->scr) scrs.push_back(*r->scr);
    sizes.push_back(static_cast<double>(r->pretrain_size));
    s.num_classes = r->num_classes;
  }
  std::tie(s.top1_mean, s.top1_std) = mean_std(top1);
  if (!top5.empty() && top5.size() == runs.size()) {
    const auto [m, sd] = mean_std(top5);
    s.top5_mean = m;
    s.top5_std = sd;
  }
  s.map_mean = mean_std(maps).first;
  if (!scrs.empty()) s.scr_mean = mean_std(scrs).first;
  s.pretrain_size_mean = mean_std(sizes).first;
  s.top1_by_seed = top1;
  return s;
}

}  // namespace

ComparisonTable compare_strategies(const ExperimentConfig& cfg, std::span<const StrategyConfig> strategies,
                                   const std::optional<fs::path>& artifact_dir) {
  cfg.validate();
  std::vector<Arm> arms;
  if (cfg.include_no_pretrain) arms.emplace_back(std::nullopt);
  for (const auto& s : strategies) {
    s.validate(cfg.n());
    arms.emplace_back(s);
  }
  if (arms.empty()) fail(ErrorKind::InvalidArgument, "compare_strategies needs at least one arm");

  if (artifact_dir) write_text(*artifact_dir / "config.json", dump_json(experiment_config_to_json(cfg), 2) + "\n");

  ComparisonTable table;
  for (const std::uint64_t seed : cfg.seeds) {
    const Upstream up = prepare_upstream(cfg, seed);
    const fs::path seed_dir = artifact_dir ? *artifact_dir / ("seed-" + std::to_string(seed)) : fs::path{};
    if (artifact_dir) write_upstream_artifacts(seed_dir, cfg, up);
    for (const auto& arm : arms) {
      ArmOutputs out = run_arm(cfg, up, arm);
      if (artifact_dir) write_arm_artifacts(seed_dir / arm_slug(arm), cfg, out);
      table.runs.push_back(std::move(out.result));
    }
  }
  for (const auto& arm : arms) {
    std::vector<const RunResult*> runs;
    const std::string label = arm_label(arm);
    for (const auto& r : table.runs) {
      if (r.arm == label) runs.push_back(&r);
    }
    table.rows.push_back(summarize(label, runs));
  }
  if (artifact_dir) {
    write_text(*artifact_dir / "report.json", dump_json(comparison_to_json(cfg, table), 2) + "\n");
    write_text(*artifact_dir / "report.txt", comparison_to_text(table));
  }
  return table;
}

ComparisonTable compare_strategies(const ExperimentConfig& cfg) {
  return compare_strategies(cfg, cfg.strategies);
}

std::vector<SweepRow> sweep_scr(const ExperimentConfig& cfg, StrategyKind kind, std::span<const std::size_t> budgets) {
  cfg.validate();
  if (!needs_budget(kind)) fail(ErrorKind::InvalidArgument, "sweep applies to spl-m and spl-d only");
  if (budgets.empty()) fail(ErrorKind::InvalidArgument, "sweep needs at least one budget");
  for (const std::size_t k : budgets) StrategyConfig{kind, k}.validate(cfg.n());

  std::vector<SweepRow> rows(budgets.size());
  for (const std::uint64_t seed : cfg.seeds) {
    const Upstream up = prepare_upstream(cfg, seed);
    for (std::size_t i = 0; i < budgets.size(); ++i) {
      rows[i].runs.push_back(run_arm(cfg, up, StrategyConfig{kind, budgets[i]}).result);
    }
  }
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    SweepRow& row = rows[i];
    row.k = budgets[i];
    row.num_classes = budgets[i] * cfg.corpus.n;
    std::vector<double> scr, top1;
    for (const auto& r : row.runs) {
      scr.push_back(*r.scr);
      top1.push_back(r.final_eval.top1);
    }
    row.scr_mean = mean_std(scr).first;
    std::tie(row.top1_mean, row.top1_std) = mean_std(top1);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Reports

Json run_result_to_json(const RunResult& r) {
  Json j = Json::object();
  j["arm"] = r.arm;
  j["strategy"] = r.strategy ? Json(std::string(strategy_name(r.strategy->kind))) : Json(nullptr);
  j["k"] = r.strategy && r.strategy->k && needs_budget(r.strategy->kind) ? Json(*r.strategy->k) : Json(nullptr);
  j["seed"] = r.seed;
  j["num_classes"] = r.num_classes;
  j["scr"] = r.scr ? Json(*r.scr) : Json(nullptr);
  j["noise_ratio"] = r.noise_ratio;
  j["pretrain_size"] = r.pretrain_size;
  j["teacher_eval"] = eval_report_to_json(r.teacher_eval);
  j["final_eval"] = eval_report_to_json(r.final_eval);
  j["final_map"] = r.final_map;
  Json rows = Json::array();
  for (std::size_t row = 0; row < r.confusion.size(); ++row) {
    Json cols = Json::array();
    for (std::size_t col = 0; col < r.confusion.size(); ++col) cols.push_back(r.confusion.at(row, col));
    rows.push_back(std::move(cols));
  }
  j["confusion"] = std::move(rows);
  return j;
}

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string fixed(double v, int decimals = 4) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

}  // namespace

Json comparison_to_json(const ExperimentConfig& cfg, const ComparisonTable& table) {
  Json j = Json::object();
  j["config"] = experiment_config_to_json(cfg);
  Json rows = Json::array();
  for (const auto& s : table.rows) {
    Json row = Json::object();
    row["arm"] = s.arm;
    row["runs"] = s.runs;
    row["num_classes"] = s.num_classes;
    row["top1_mean"] = s.top1_mean;
    row["top1_std"] = s.top1_std;
    row["top5_mean"] = optional_number(s.top5_mean);
    row["top5_std"] = optional_number(s.top5_std);
    row["map_mean"] = s.map_mean;
    row["scr_mean"] = optional_number(s.scr_mean);
    row["pretrain_size_mean"] = s.pretrain_size_mean;
    row["top1_by_seed"] = s.top1_by_seed;
    rows.push_back(std::move(row));
  }
  j["arms"] = std::move(rows);
  Json runs = Json::array();
  for (const auto& r : table.runs) runs.push_back(run_result_to_json(r));
  j["runs"] = std::move(runs);
  return j;
}

std::string comparison_to_text(const ComparisonTable& table) {
  std::string out;
  out += pad("arm", 22, true) + pad("classes", 8) + pad("pretrain", 10) + pad("scr", 8) + pad("top1", 9) +
         pad("+/-", 8) + pad("top5", 9) + pad("mAP", 9) + "\n";
  for (const auto& s : table.rows) {
    out += pad(s.arm, 22, true) + pad(std::to_string(s.num_classes), 8) +
           pad(fixed(s.pretrain_size_mean, 0), 10) + pad(s.scr_mean ? fixed(*s.scr_mean, 3) : "-", 8) +
           pad(fixed(s.top1_mean), 9) + pad(fixed(s.top1_std), 8) +
           pad(s.top5_mean ? fixed(*s.top5_mean) : "-", 9) + pad(fixed(s.map_mean), 9) + "\n";
  }
  return out;
}

Json sweep_to_json(const ExperimentConfig& cfg, StrategyKind kind, std::span<const SweepRow> rows) {
  Json j = Json::object();
  j["config"] = experiment_config_to_json(cfg);
  j["strategy"] = std::string(strategy_name(kind));
  Json arr = Json::array();
  for (const auto& row : rows) {
    Json o = Json::object();
    o["k"] = row.k;
    o["num_classes"] = row.num_classes;
    o["scr_mean"] = row.scr_mean;
    o["top1_mean"] = row.top1_mean;
    o["top1_std"] = row.top1_std;
    Json runs = Json::array();
    for (const auto& r : row.runs) runs.push_back(run_result_to_json(r));
    o["runs"] = std::move(runs);
    arr.push_back(std::move(o));
  }
  j["rows"] = std::move(arr);
  return j;
}

std::string sweep_to_text(StrategyKind kind, std::span<const SweepRow> rows) {
  std::string out = "strategy " + std::string(strategy_name(kind)) + "\n";
  out += pad("k", 4) + pad("classes", 9) + pad("scr", 9) + pad("top1", 9) + pad("+/-", 8) + "\n";
  for (const auto& row : rows) {
    out += pad(std::to_string(row.k), 4) + pad(std::to_string(row.num_classes), 9) + pad(fixed(row.scr_mean), 9) +
           pad(fixed(row.top1_mean), 9) + pad(fixed(row.top1_std), 8) + "\n";
  }
  return out;
}

std::string run_result_to_text(const RunResult& r) {
  std::string out;
  out += "arm           " + r.arm + "\n";
  out += "seed          " + std::to_string(r.seed) + "\n";
  out += "num_classes   " + std::to_string(r.num_classes) + "\n";
  out += "scr           " + (r.scr ? fixed(*r.scr) : std::string("-")) + "\n";
  out += "noise_ratio   " + fixed(r.noise_ratio) + "\n";
  out += "pretrain_size " + std::to_string(r.pretrain_size) + "\n";
  out += "teacher top1  " + fixed(r.teacher_eval.top1) + "\n";
  out += "final top1    " + fixed(r.final_eval.top1) + "\n";
  out += "final top5    " + (r.final_eval.top5 ? fixed(*r.final_eval.top5) : std::string("-")) + "\n";
  out += "final mAP     " + fixed(r.final_map) + "\n";
  return out;
}

void write_upstream_artifacts(const fs::path& dir, const ExperimentConfig& cfg, const Upstream& up) {
  write_text(dir / "target.jsonl", records_to_jsonl(up.target));
  write_text(dir / "eval.jsonl", records_to_jsonl(up.eval));
  write_text(dir / "corpus.jsonl", records_to_jsonl(up.web));
  const Checkpoint teacher{up.teacher, stage_seed(up.seed, Stage::Teacher),
                           with_seed(cfg.teacher_cfg, stage_seed(up.seed, Stage::Teacher))};
  write_text(dir / "teacher.json", dump_json(checkpoint_to_json(teacher), 2) + "\n");
  write_text(dir / "confusion.csv", confusion_to_csv(up.confusion));
}

void write_arm_artifacts(const fs::path& dir, const ExperimentConfig& cfg, const ArmOutputs& out) {
  const std::uint64_t seed = out.result.seed;
  if (out.space) write_text(dir / "labelspace.json", dump_json(label_space_to_json(*out.space), 2) + "\n");
  if (out.result.strategy) write_text(dir / "relabeled.jsonl", records_to_jsonl(out.relabeled));
  if (out.pretrained) {
    const Checkpoint pre{*out.pretrained, stage_seed(seed, Stage::Pretrain),
                         with_seed(cfg.pretrain_cfg, stage_seed(seed, Stage::Pretrain))};
    write_text(dir / "pretrained.json", dump_json(checkpoint_to_json(pre), 2) + "\n");
  }
  const Checkpoint student{out.student, stage_seed(seed, Stage::Finetune),
                           with_seed(cfg.finetune_cfg, stage_seed(seed, Stage::Finetune))};
  write_text(dir / "student.json", dump_json(checkpoint_to_json(student), 2) + "\n");
  write_text(dir / "report.json", dump_json(run_result_to_json(out.result), 2) + "\n");
  write_text(dir / "report.txt", run_result_to_text(out.result));
}

}  // namespace spl

// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

// spl: command-line front end. Every pipeline stage is a subcommand that
// reads and writes the library's file formats, so stages can be chained
// file-to-file and reproduce `spl experiment` byte for byte.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "spl/confusion.hpp"
#include "spl/corpus.hpp"
#include "spl/dataset.hpp"
#include "spl/error.hpp"
#include "spl/io.hpp"
#include "spl/label_space.hpp"
#include "spl/metrics.hpp"
#include "spl/pipeline.hpp"
#include "spl/relabel.hpp"
#include "spl/train.hpp"

namespace fs = std::filesystem;
using namespace spl;

namespace {

constexpr const char* kExitCodes =
    "Exit codes: 0 ok, 2 usage (bad flag or invalid parameter), 3 format or data error,\n"
    "4 numeric divergence, 5 internal error, 6 file not found.\n"
    "Errors are printed to stderr as one line: error[Category]: message";

constexpr const char* kRecordFormat =
    "Record files are JSON lines, one clip per line:\n"
    "  {\"clip_id\", \"video_id\", \"weak_label\", \"features\": [...], \"true_label\"?,\n"
    "   \"teacher_pred\"?, \"pseudo_label\"?}\n"
    "Floats are written with 17 significant digits.";

// ---------------------------------------------------------------------------
// Shared option groups

struct ConfigFlags {
  std::string config_path;
  std::optional<std::size_t> n, feature_dim, videos, clips, target_clips, eval_clips, hidden;
  std::optional<double> p, separation, noise_std;
  std::optional<ClassId> background_class;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "Experiment config JSON (defaults: benchmark config)");
    app->add_option("--n", n, "Number of classes N");
    app->add_option("--d,--feature-dim", feature_dim, "Feature dimension");
    app->add_option("--videos", videos, "Web videos per class");
    app->add_option("--clips", clips, "Clips per web video");
    app->add_option("--p", p, "Temporal noise probability in [0, 1)");
    app->add_option("--separation", separation, "Prototype norm");
    app->add_option("--noise-std", noise_std, "Per-feature clip noise (default 0.35 x separation)");
    app->add_option("--target-clips", target_clips, "Target set clips per class");
    app->add_option("--eval-clips", eval_clips, "Held-out evaluation clips per class");
    app->add_option("--hidden", hidden, "Student hidden width");
    app->add_option("--background-class", background_class, "Class excluded from mAP");
  }

  ExperimentConfig load(bool stage_only = true) const {
    ExperimentConfig cfg = benchmark_config();
    if (!config_path.empty()) cfg = experiment_config_from_json(parse_json(read_text(config_path), config_path));
    if (n) cfg.corpus.n = *n;
    if (feature_dim) cfg.corpus.feature_dim = *feature_dim;
    if (videos) cfg.corpus.videos_per_class = *videos;
    if (clips) cfg.corpus.clips_per_video = *clips;
    if (p) cfg.corpus.temporal_noise_p = *p;
    if (separation) {
      cfg.corpus.prototype_separation = *separation;
      if (!noise_std) cfg.corpus.noise_std = 0.35 * *separation;
    }
    if (noise_std) cfg.corpus.noise_std = *noise_std;
    if (target_clips) cfg.target_clips_per_class = *target_clips;
    if (eval_clips) cfg.eval_clips_per_class = *eval_clips;
    if (hidden) cfg.hidden_width = *hidden;
    if (background_class) cfg.background_class = *background_class;
    // Relatedness from a config file must match N; a changed N falls back to
    // the default nearest-neighbour relatedness.
    if (n && cfg.corpus.relatedness.rows != cfg.corpus.n) cfg.corpus.relatedness = {};
    if (stage_only) {
      // Single stages never read the arm list.
      cfg.strategies.clear();
      cfg.strategy = {StrategyKind::SplB, std::nullopt};
    }
    cfg.validate();
    return cfg;
  }
};

struct TrainFlags {
  std::optional<double> lr;
  std::optional<std::size_t> epochs, batch_size;

  void attach(CLI::App* app) {
    app->add_option("--lr", lr, "Learning rate override");
    app->add_option("--epochs", epochs, "Epoch count override");
    app->add_option("--batch-size", batch_size, "Minibatch size override");
  }

  void apply(TrainConfig& cfg) const {
    if (lr) cfg.learning_rate = *lr;
    if (epochs) cfg.epochs = *epochs;
    if (batch_size) cfg.batch_size = *batch_size;
    cfg.validate();
  }
};

struct StrategyFlags {
  std::string name;
  std::optional<std::size_t> k;

  void attach(CLI::App* app, bool required) {
    auto* opt = app->add_option("--strategy", name,
                                "spl, spl-m, spl-d, spl-b, weak-label, teacher-pred or agreement-filter");
    if (required) opt->required();
    app->add_option("--k", k, "Budget multiplier K for spl-m / spl-d (K*N classes)");
  }

  std::optional<StrategyConfig> get() const {
    if (name.empty()) {
      if (k) fail(ErrorKind::BadFlag, "--k given without --strategy");
      return std::nullopt;
    }
    StrategyConfig s{parse_strategy(name), std::nullopt};
    if (needs_budget(s.kind)) {
      s.k = k;
    } else if (k) {
      fail(ErrorKind::BadFlag, "--k only applies to spl-m and spl-d");
    }
    return s;
  }
};

// "spl-d:2" or "spl-b".
StrategyConfig parse_strategy_item(const std::string& item) {
  const auto colon = item.find(':');
  StrategyConfig s{parse_strategy(item.substr(0, colon)), std::nullopt};
  if (colon != std::string::npos) {
    const std::string k = item.substr(colon + 1);
    if (k.empty() || k.find_first_not_of("0123456789") != std::string::npos) {
      fail(ErrorKind::BadFlag, "bad budget in '" + item + "'");
    }
    s.k = std::stoul(k);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Helpers

void require_seed(const std::optional<std::uint64_t>& seed, const char* command) {
  if (!seed) fail(ErrorKind::BadFlag, std::string(command) + " is stochastic and requires --seed");
}

/// Largest weak / teacher label + 1, for commands run without --n.
std::size_t infer_n(std::span<const ClipRecord> records) {
  std::size_t n = 2;
  for (const auto& r : records) {
    n = std::max<std::size_t>(n, r.weak_label + 1);
    if (r.teacher_pred) n = std::max<std::size_t>(n, *r.teacher_pred + 1);
  }
  return n;
}

std::string sidecar_path(const fs::path& out) {
  fs::path p = out;
  p.replace_extension();
  return p.string() + ".spec.json";
}

Checkpoint load_checkpoint(const std::string& path) {
  try {
    return checkpoint_from_json(parse_json(read_text(path), path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::FileNotFound) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

SplLabelSpace load_label_space(const std::string& path) {
  try {
    return label_space_from_json(parse_json(read_text(path), path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::FileNotFound) throw;
    throw Error(e.kind(), path + ": " + e.what());
  }
}

ConfusionMatrix load_confusion(const std::string& path) { return confusion_from_csv(read_text(path), path); }

MlpModel require_mlp(const Checkpoint& c, const std::string& path) {
  if (!std::holds_alternative<MlpModel>(c.model)) fail(ErrorKind::FormatError, path + ": expected an mlp_tanh checkpoint");
  return std::get<MlpModel>(c.model);
}

LinearSoftmaxModel require_linear(const Checkpoint& c, const std::string& path) {
  if (!std::holds_alternative<LinearSoftmaxModel>(c.model)) {
    fail(ErrorKind::FormatError, path + ": expected a linear_softmax checkpoint");
  }
  return std::get<LinearSoftmaxModel>(c.model);
}

std::string checkpoint_text(const Checkpoint& c) { return dump_json(checkpoint_to_json(c), 2) + "\n"; }

void print(const std::string& s) { std::fwrite(s.data(), 1, s.size(), stdout); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spl: sub-pseudo-label relabeling and pre-training pipeline"};
  app.require_subcommand(1);
  app.footer(kExitCodes);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::function<void()> action;

  // simulate ---------------------------------------------------------------
  ConfigFlags sim_cfg;
  std::string sim_kind = "web";
  std::optional<std::uint64_t> sim_seed;
  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic web corpus, target set or evaluation set");
  sim_cfg.attach(sim);
  sim->add_option("--kind", sim_kind, "web | target | eval")->check(CLI::IsMember({"web", "target", "eval"}));
  sim->add_option("--seed", sim_seed, "Run seed (stage seeds are derived from it)");
  sim->add_option("-o,--output", sim_out, "Output JSONL")->required();
  sim->footer(std::string(kRecordFormat) +
              "\nThe generating spec is written next to the output as <name>.spec.json.\n"
              "Web clips carry weak_label (query class) and true_label; target/eval clips have both equal.");
  sim->callback([&] {
    action = [&] {
      require_seed(sim_seed, "simulate");
      const auto cfg = sim_cfg.load();
      SyntheticCorpus corpus;
      Json spec;
      if (sim_kind == "web") {
        const auto s = web_spec_for(cfg, *sim_seed);
        corpus = generate_web_corpus(s);
        spec = corpus_spec_to_json(s);
        if (s.relatedness.values.empty()) {
          // Record the relatedness actually used.
          const auto& m = corpus.relatedness;
          Json rows = Json::array();
          for (std::size_t r = 0; r < m.rows; ++r) {
            Json row = Json::array();
            for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m(r, c));
            rows.push_back(std::move(row));
          }
          spec["relatedness"] = std::move(rows);
        }
      } else {
        const auto s = sim_kind == "target" ? target_spec_for(cfg, *sim_seed) : eval_spec_for(cfg, *sim_seed);
        corpus = generate_target_set(s);
        spec = target_spec_to_json(s);
      }
      save_records(sim_out, corpus.records);
      write_text(sidecar_path(sim_out), dump_json(spec, 2) + "\n");
      std::fprintf(stderr, "wrote %zu clips to %s\n", corpus.records.size(), sim_out.c_str());
    };
  });

  // teach ------------------------------------------------------------------
  ConfigFlags teach_cfg;
  TrainFlags teach_train;
  std::optional<std::uint64_t> teach_seed;
  std::string teach_target, teach_out;
  auto* teach = app.add_subcommand("teach", "Train the linear-softmax teacher on a labeled target set");
  teach_cfg.attach(teach);
  teach_train.attach(teach);
  teach->add_option("--target", teach_target, "Target set JSONL")->required();
  teach->add_option("--seed", teach_seed, "Run seed");
  teach->add_option("-o,--output", teach_out, "Checkpoint JSON")->required();
  teach->footer("Checkpoint JSON: {model_kind, dims, parameters (nested arrays), seed, train_config}.");
  teach->callback([&] {
    action = [&] {
      require_seed(teach_seed, "teach");
      const auto cfg = teach_cfg.load();
      TrainConfig tc = with_seed(cfg.teacher_cfg, stage_seed(*teach_seed, Stage::Teacher));
      teach_train.apply(tc);
      const auto target = load_records(teach_target);
      const auto teacher = train_teacher(target, cfg.corpus.n, tc);
      write_text(teach_out, checkpoint_text({teacher, tc.seed, tc}));
    };
  });

  // infer ------------------------------------------------------------------
  std::string infer_model, infer_in, infer_out;
  auto* infer = app.add_subcommand("infer", "Fill teacher_pred on every record using a trained model");
  infer->add_option("--model", infer_model, "Teacher checkpoint JSON")->required();
  infer->add_option("-i,--input", infer_in, "Records JSONL")->required();
  infer->add_option("-o,--output", infer_out, "Annotated JSONL")->required();
  infer->footer(kRecordFormat);
  infer->callback([&] {
    action = [&] {
      const auto ckpt = load_checkpoint(infer_model);
      auto records = load_records(infer_in);
      std::visit(
          [&](const auto& model) {
            for (auto& r : records) {
              if (r.features.size() != model.feature_dim()) {
                fail(ErrorKind::DimensionMismatch, "clip " + r.clip_id + " has " + std::to_string(r.features.size()) +
                                                       " features, model expects " +
                                                       std::to_string(model.feature_dim()));
              }
              r.teacher_pred = predict(model, r.features).label;
            }
          },
          ckpt.model);
      save_records(infer_out, records);
    };
  });

  // confusion --------------------------------------------------------------
  std::string conf_in, conf_out;
  std::optional<std::size_t> conf_n;
  auto* conf = app.add_subcommand("confusion", "Build the weak-label x teacher-prediction confusion matrix");
  conf->add_option("-i,--input", conf_in, "Annotated JSONL (teacher_pred required)")->required();
  conf->add_option("--n", conf_n, "Number of classes (default: largest label + 1)");
  conf->add_option("-o,--output", conf_out, "Confusion CSV")->required();
  conf->footer(
      "Confusion CSV: header row of class ids 0..N-1, then N rows of N integer counts;\n"
      "row = weak label, column = teacher prediction.");
  conf->callback([&] {
    action = [&] {
      const auto records = load_records(conf_in);
      const auto c = build_confusion(records, ClassCount(conf_n ? *conf_n : infer_n(records)));
      write_text(conf_out, confusion_to_csv(c));
      std::fprintf(stderr, "total %llu, noise ratio %.4f\n", static_cast<unsigned long long>(c.total()),
                   c.total() ? noise_ratio(c) : 0.0);
    };
  });

  // labelspace -------------------------------------------------------------
  std::string ls_conf, ls_out;
  StrategyFlags ls_strategy;
  auto* ls = app.add_subcommand("labelspace", "Build an SPL label space from a confusion matrix");
  ls->add_option("--confusion", ls_conf, "Confusion CSV")->required();
  ls_strategy.attach(ls, true);
  ls->add_option("-o,--output", ls_out, "Label-space JSON")->required();
  ls->footer(
      "Label-space JSON: {strategy, k, n, num_classes, scr, cells: [{row, col, class | \"discard\", count}]}.");
  ls->callback([&] {
    action = [&] {
      const auto s = *ls_strategy.get();
      const auto c = load_confusion(ls_conf);
      const auto space = build_label_space(c, s);
      write_text(ls_out, dump_json(label_space_to_json(space), 2) + "\n");
      std::printf("%s: %zu classes, scr %.4f\n", s.label().c_str(), space.num_classes(), space.scr());
    };
  });

  // relabel ----------------------------------------------------------------
  std::string rl_in, rl_out, rl_space, rl_conf;
  std::optional<std::size_t> rl_n;
  StrategyFlags rl_strategy;
  auto* rl = app.add_subcommand("relabel", "Assign pseudo labels with an SPL strategy or a baseline");
  rl->add_option("-i,--input", rl_in, "Annotated JSONL")->required();
  rl_strategy.attach(rl, false);
  rl->add_option("--labelspace", rl_space, "Label-space JSON (SPL strategies)");
  rl->add_option("--confusion", rl_conf, "Confusion CSV to build the label space from");
  rl->add_option("--n", rl_n, "Number of classes (default: from label space / confusion / records)");
  rl->add_option("-o,--output", rl_out, "Relabeled JSONL")->required();
  rl->footer(std::string(kRecordFormat) +
             "\nWith --labelspace the strategy is read from the file. Otherwise SPL spaces are\n"
             "built from --confusion, or from the input records when no CSV is given.\n"
             "spl-d and agreement-filter drop records; all other strategies keep every record.");
  rl->callback([&] {
    action = [&] {
      auto strategy = rl_strategy.get();
      std::optional<SplLabelSpace> space;
      if (!rl_space.empty()) {
        space = load_label_space(rl_space);
        if (strategy && !(*strategy == space->strategy())) {
          fail(ErrorKind::BadFlag, "--strategy " + strategy->label() + " disagrees with label space " +
                                       space->strategy().label());
        }
        strategy = space->strategy();
      }
      if (!strategy) fail(ErrorKind::BadFlag, "relabel needs --strategy or --labelspace");
      std::optional<ConfusionMatrix> c;
      if (!rl_conf.empty()) c = load_confusion(rl_conf);
      const auto records = load_records(rl_in);
      std::size_t n = rl_n ? *rl_n : space ? space->n().value() : c ? c->size() : infer_n(records);
      strategy->validate(ClassCount(n));
      if (is_spl(strategy->kind) && !space) {
        space = build_label_space(c ? *c : build_confusion(records, ClassCount(n)), *strategy);
      }
      const auto out = apply_strategy(records, *strategy, ClassCount(n), space ? &*space : nullptr);
      save_records(rl_out, out);
      std::fprintf(stderr, "%s: kept %zu of %zu records\n", strategy->label().c_str(), out.size(), records.size());
    };
  });

  // stats ------------------------------------------------------------------
  std::string st_in, st_space, st_csv, st_json, st_conf;
  std::optional<std::size_t> st_classes, st_n;
  auto* st = app.add_subcommand("stats", "Class-distribution (long-tail) statistics of relabeled records");
  st->add_option("-i,--input", st_in, "Relabeled JSONL (pseudo_label required)")->required();
  st->add_option("--labelspace", st_space, "Label-space JSON (marks diagonal classes)");
  st->add_option("--num-classes", st_classes, "Label-space size without a label-space file");
  st->add_option("--n", st_n, "Number of original classes (ids < N count as diagonal)");
  st->add_option("--confusion", st_conf, "Confusion CSV; adds its noise ratio to the report");
  st->add_option("--csv", st_csv, "Write class_id,count CSV");
  st->add_option("--json", st_json, "Write the distribution as JSON");
  st->footer("Prints an aligned text report to stdout. CSV columns: class_id,count.");
  st->callback([&] {
    action = [&] {
      const auto records = load_records(st_in);
      ClassDistribution dist;
      if (!st_space.empty()) {
        dist = class_distribution(records, load_label_space(st_space));
      } else {
        std::size_t max_label = 0;
        for (const auto& r : records) {
          if (r.pseudo_label) max_label = std::max<std::size_t>(max_label, *r.pseudo_label + 1);
        }
        const std::size_t classes = st_classes ? *st_classes : std::max<std::size_t>(max_label, 2);
        dist = class_distribution(records, classes, st_n ? *st_n : classes);
      }
      Json j = class_distribution_to_json(dist);
      std::optional<double> noise;
      if (!st_conf.empty()) {
        noise = noise_ratio(load_confusion(st_conf));
        j["noise_ratio"] = *noise;
      }
      if (!st_csv.empty()) write_text(st_csv, class_distribution_to_csv(dist));
      if (!st_json.empty()) write_text(st_json, dump_json(j, 2) + "\n");
      std::printf("classes        %zu\n", dist.class_counts.size());
      std::printf("records        %llu\n", static_cast<unsigned long long>(dist.total));
      std::printf("median count   %.1f\n", dist.median);
      std::printf("head / tail    %zu / %zu\n", dist.head_classes, dist.tail_classes);
      std::printf("empty classes  %zu\n", dist.empty_classes.size());
      std::printf("diagonal mass  %llu\n", static_cast<unsigned long long>(dist.diagonal_mass));
      std::printf("off-diagonal   %llu\n", static_cast<unsigned long long>(dist.off_diagonal_mass));
      if (noise) std::printf("noise ratio    %.4f\n", *noise);
      std::printf("\n%8s %10s\n", "class", "count");
      for (std::size_t c = 0; c < dist.class_counts.size(); ++c) {
        std::printf("%8zu %10llu\n", c, static_cast<unsigned long long>(dist.class_counts[c]));
      }
    };
  });

  // pretrain ---------------------------------------------------------------
  ConfigFlags pre_cfg;
  TrainFlags pre_train;
  std::optional<std::uint64_t> pre_seed;
  std::optional<std::size_t> pre_classes;
  std::string pre_in, pre_space, pre_out;
  auto* pre = app.add_subcommand("pretrain", "Pre-train the MLP student on pseudo labels");
  pre_cfg.attach(pre);
  pre_train.attach(pre);
  pre->add_option("-i,--input", pre_in, "Relabeled JSONL")->required();
  pre->add_option("--labelspace", pre_space, "Label-space JSON (SPL strategies)");
  pre->add_option("--num-classes", pre_classes, "Head size without a label space (default N)");
  pre->add_option("--seed", pre_seed, "Run seed");
  pre->add_option("-o,--output", pre_out, "Checkpoint JSON")->required();
  pre->callback([&] {
    action = [&] {
      require_seed(pre_seed, "pretrain");
      const auto cfg = pre_cfg.load();
      TrainConfig tc = with_seed(cfg.pretrain_cfg, stage_seed(*pre_seed, Stage::Pretrain));
      pre_train.apply(tc);
      std::optional<SplLabelSpace> space;
      if (!pre_space.empty()) space = load_label_space(pre_space);
      const std::size_t classes = space ? space->num_classes() : pre_classes ? *pre_classes : cfg.corpus.n;
      const auto records = load_records(pre_in);
      const auto model = pretrain_student(records, classes, space ? &*space : nullptr, cfg.hidden_width, tc);
      write_text(pre_out, checkpoint_text({model, tc.seed, tc}));
    };
  });

  // finetune ---------------------------------------------------------------
  ConfigFlags ft_cfg;
  TrainFlags ft_train;
  std::optional<std::uint64_t> ft_seed;
  std::string ft_model, ft_target, ft_out;
  auto* ft = app.add_subcommand("finetune", "Swap the head to N classes and fine-tune on the target set");
  ft_cfg.attach(ft);
  ft_train.attach(ft);
  ft->add_option("--model", ft_model, "Pre-trained checkpoint (omit to train from scratch)");
  ft->add_option("--target", ft_target, "Target set JSONL")->required();
  ft->add_option("--seed", ft_seed, "Run seed");
  ft->add_option("-o,--output", ft_out, "Checkpoint JSON")->required();
  ft->callback([&] {
    action = [&] {
      require_seed(ft_seed, "finetune");
      const auto cfg = ft_cfg.load();
      TrainConfig tc = with_seed(cfg.finetune_cfg, stage_seed(*ft_seed, Stage::Finetune));
      ft_train.apply(tc);
      std::optional<MlpModel> pretrained;
      if (!ft_model.empty()) pretrained = require_mlp(load_checkpoint(ft_model), ft_model);
      const auto target = load_records(ft_target);
      MlpModel student{2, 2, 1};
      if (pretrained) {
        student = finetune_student(*pretrained, target, cfg.corpus.n, stage_seed(*ft_seed, Stage::SwapHead), tc);
      } else {
        const Dataset data = to_dataset(target, LabelField::Weak);
        student = train(MlpModel(cfg.corpus.n, data.feature_dim, cfg.hidden_width), data, tc);
      }
      write_text(ft_out, checkpoint_text({student, tc.seed, tc}));
    };
  });

  // evaluate ---------------------------------------------------------------
  ConfigFlags ev_cfg;
  StrategyFlags ev_strategy;
  std::optional<std::uint64_t> ev_seed;
  std::string ev_model, ev_eval, ev_teacher, ev_conf, ev_space, ev_relabeled, ev_out, ev_text;
  auto* ev = app.add_subcommand("evaluate", "Evaluate a student and write a run report");
  ev_cfg.attach(ev);
  ev_strategy.attach(ev, false);
  ev->add_option("--model", ev_model, "Student checkpoint")->required();
  ev->add_option("--eval", ev_eval, "Held-out evaluation JSONL (true_label required)")->required();
  ev->add_option("--teacher", ev_teacher, "Teacher checkpoint (reported teacher accuracy)")->required();
  ev->add_option("--confusion", ev_conf, "Confusion CSV of the run")->required();
  ev->add_option("--labelspace", ev_space, "Label-space JSON of the run (SPL strategies)");
  ev->add_option("--relabeled", ev_relabeled, "Pre-training records (reported pre-training size)");
  ev->add_option("--seed", ev_seed, "Run seed recorded in the report")->required();
  ev->add_option("-o,--output", ev_out, "Report JSON")->required();
  ev->add_option("--text", ev_text, "Also write the text report here");
  ev->footer(
      "Without --strategy the run is reported as the no-pretrain arm. The report matches\n"
      "<seed>/<arm>/report.json written by `spl experiment`.");
  ev->callback([&] {
    action = [&] {
      const auto cfg = ev_cfg.load();
      auto strategy = ev_strategy.get();
      std::optional<SplLabelSpace> space;
      if (!ev_space.empty()) {
        space = load_label_space(ev_space);
        if (!strategy) strategy = space->strategy();
      }
      if (strategy) strategy->validate(cfg.n());
      const auto student = require_mlp(load_checkpoint(ev_model), ev_model);
      const auto teacher = require_linear(load_checkpoint(ev_teacher), ev_teacher);
      const auto confusion = load_confusion(ev_conf);
      const auto eval = load_records(ev_eval);
      if (strategy && is_spl(strategy->kind) && !space) space = build_label_space(confusion, *strategy);

      RunResult r;
      r.arm = arm_label(strategy);
      r.strategy = strategy;
      r.seed = *ev_seed;
      r.teacher_eval = evaluate(teacher, eval);
      r.confusion = confusion;
      r.noise_ratio = noise_ratio(confusion);
      r.num_classes = space ? space->num_classes() : cfg.corpus.n;
      if (space) r.scr = space->scr();
      if (!ev_relabeled.empty()) r.pretrain_size = load_records(ev_relabeled).size();
      const auto scores = score_records(student, eval);
      r.final_eval = evaluate(scores, eval);
      std::vector<ClassId> labels;
      for (const auto& rec : eval) labels.push_back(*rec.true_label);
      r.final_map = mean_ap_excluding_background(scores, labels, cfg.background_class);

      write_text(ev_out, dump_json(run_result_to_json(r), 2) + "\n");
      const auto text = run_result_to_text(r);
      if (!ev_text.empty()) write_text(ev_text, text);
      print(text);
    };
  });

  // experiment -------------------------------------------------------------
  ConfigFlags ex_cfg;
  std::vector<std::string> ex_strategies;
  std::vector<std::uint64_t> ex_seeds;
  bool ex_no_baseline = false;
  std::string ex_out;
  auto* ex = app.add_subcommand("experiment", "Multi-seed strategy comparison (all stages, shared upstream per seed)");
  ex_cfg.attach(ex);
  ex->add_option("--strategies", ex_strategies, "Comma-separated arms, e.g. spl-b,spl-d:2 (default: config)")
      ->delimiter(',');
  ex->add_option("--seed,--seeds", ex_seeds, "Comma-separated run seeds (default: config)")->delimiter(',');
  ex->add_flag("--no-pretrain-arm{false},--skip-no-pretrain", ex_no_baseline, "Drop the from-scratch arm");
  ex->add_option("-o,--output", ex_out, "Artifact directory")->required();
  ex->footer(
      "Writes config.json, report.json, report.txt and, per seed, seed-<s>/{target,eval,corpus}.jsonl,\n"
      "teacher.json, confusion.csv and seed-<s>/<arm>/{labelspace.json, relabeled.jsonl,\n"
      "pretrained.json, student.json, report.json, report.txt}.");
  ex->callback([&] {
    action = [&] {
      auto cfg = ex_cfg.load(false);
      if (!ex_strategies.empty()) {
        cfg.strategies.clear();
        for (const auto& s : ex_strategies) cfg.strategies.push_back(parse_strategy_item(s));
      }
      if (!ex_seeds.empty()) cfg.seeds = ex_seeds;
      if (ex_no_baseline) cfg.include_no_pretrain = false;
      cfg.validate();
      const auto table = compare_strategies(cfg, cfg.strategies, fs::path(ex_out));
      print(comparison_to_text(table));
    };
  });

  // sweep ------------------------------------------------------------------
  ConfigFlags sw_cfg;
  std::string sw_kind, sw_out;
  std::vector<std::size_t> sw_budgets;
  std::vector<std::uint64_t> sw_seeds;
  auto* sw = app.add_subcommand("sweep", "SCR sweep over budgets K for spl-m or spl-d");
  sw_cfg.attach(sw);
  sw->add_option("--strategy", sw_kind, "spl-m or spl-d")->required();
  sw->add_option("--budgets", sw_budgets, "Comma-separated K values")->delimiter(',')->required();
  sw->add_option("--seed,--seeds", sw_seeds, "Comma-separated run seeds (default: config)")->delimiter(',');
  sw->add_option("-o,--output", sw_out, "Report directory (report.json, report.txt)")->required();
  sw->callback([&] {
    action = [&] {
      const auto kind = parse_strategy(sw_kind);
      if (!needs_budget(kind)) fail(ErrorKind::BadFlag, "sweep applies to spl-m and spl-d");
      auto cfg = sw_cfg.load(false);
      if (!sw_seeds.empty()) cfg.seeds = sw_seeds;
      cfg.validate();
      for (const auto k : sw_budgets) StrategyConfig{kind, k}.validate(cfg.n());
      const auto rows = sweep_scr(cfg, kind, sw_budgets);
      write_text(fs::path(sw_out) / "report.json", dump_json(sweep_to_json(cfg, kind, rows), 2) + "\n");
      const auto text = sweep_to_text(kind, rows);
      write_text(fs::path(sw_out) / "report.txt", text);
      print(text);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error[BadFlag]: %s\n", e.what());
    return exit_code(ErrorKind::BadFlag);
  }

  try {
    action();
  } catch (const Error& e) {
    std::fprintf(stderr, "error[%s]: %s\n", std::string(to_string(e.kind())).c_str(), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error[Internal]: %s\n", e.what());
    return exit_code(ErrorKind::Internal);
  }
  return 0;
}

// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "spl/confusion.hpp"
#include "spl/corpus.hpp"
#include "spl/io.hpp"
#include "spl/label_space.hpp"
#include "spl/metrics.hpp"
#include "spl/model.hpp"
#include "spl/pipeline.hpp"
#include "spl/relabel.hpp"
#include "spl/rng.hpp"
#include "spl/train.hpp"

namespace fs = std::filesystem;
using namespace spl;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ConfusionMatrix random_confusion(Rng& rng, std::size_t n) {
  ConfusionMatrix c{ClassCount(n)};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t col = 0; col < n; ++col) {
      if (r != col && rng.below(3) == 0) continue;
      c.add(r, col, rng.below(r == col ? 200 : 40));
    }
  }
  if (c.total() == 0) c.add(0, 0, 1);
  return c;
}

// Values and ids are only a function of the cell, so sorting the full list
// is an independent way to find the top off-diagonal cells.
std::vector<std::size_t> sorted_off_diagonal(const ConfusionMatrix& c) {
  const std::size_t n = c.size();
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < n * n; ++i) {
    if (i / n != i % n) cells.push_back(i);
  }
  std::sort(cells.begin(), cells.end(), [&](std::size_t a, std::size_t b) {
    const auto ca = c.counts()[a], cb = c.counts()[b];
    return ca != cb ? ca > cb : a < b;
  });
  return cells;
}

Check bijection() {
  Check ch;
  for (std::size_t n = 2; n <= 32; ++n) {
    std::vector<bool> hit(n * n, false);
    for (std::size_t w = 0; w < n; ++w) {
      for (std::size_t t = 0; t < n; ++t) {
        const auto id = assign_spl_full(w, t, ClassCount(n));
        ch.expect(id < n * n && !hit[id], fmt("N=%zu cell (%zu,%zu)", n, w, t));
        if (id < n * n) hit[id] = true;
      }
    }
    ch.expect(std::all_of(hit.begin(), hit.end(), [](bool b) { return b; }), fmt("N=%zu not onto", n));
  }
  return ch;
}

Check label_space_contracts() {
  Check ch;
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(19);
    const std::size_t k = 2 + rng.below(n - 1);
    const auto c = random_confusion(rng, n);
    const auto b = build_label_space(c, {StrategyKind::SplB, {}});
    ch.expect(b.num_classes() == 2 * n, fmt("trial %d spl-b size", trial));

    const auto order = sorted_off_diagonal(c);
    const std::set<std::size_t> chosen(order.begin(), order.begin() + static_cast<long>((k - 1) * n));
    for (const auto kind : {StrategyKind::SplM, StrategyKind::SplD}) {
      const auto s = build_label_space(c, {kind, k});
      ch.expect(s.num_classes() == k * n, fmt("trial %d K*N size", trial));
      std::uint64_t min_sel = UINT64_MAX, max_unsel = 0;
      for (std::size_t r = 0; r < n; ++r) {
        ch.expect(s.class_of(r, r) == static_cast<ClassId>(r), fmt("trial %d diagonal %zu", trial, r));
        for (std::size_t col = 0; col < n; ++col) {
          if (r == col) continue;
          const std::size_t cell = r * n + col;
          ch.expect(s.is_selected(r, col) == (chosen.count(cell) == 1), fmt("trial %d cell (%zu,%zu)", trial, r, col));
          if (s.is_selected(r, col)) {
            min_sel = std::min(min_sel, c.at(r, col));
          } else {
            max_unsel = std::max(max_unsel, c.at(r, col));
          }
        }
      }
      ch.expect(max_unsel <= min_sel, fmt("trial %d frequency order", trial));
    }
    for (std::size_t r = 0; r < n; ++r) ch.expect(b.class_of(r, r) == static_cast<ClassId>(r), "spl-b diagonal");
  }
  return ch;
}

Check conservation() {
  Check ch;
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(11);
    const std::size_t size = 50 + rng.below(2000);
    RecordSet recs(size);
    for (std::size_t i = 0; i < size; ++i) {
      auto& r = recs[i];
      r.clip_id = fmt("c%zu", i);
      r.video_id = r.clip_id;
      r.weak_label = static_cast<ClassId>(rng.below(n));
      // Skewed toward agreement, with a biased confusion neighbour.
      const auto u = rng.below(10);
      r.teacher_pred = static_cast<ClassId>(u < 6 ? r.weak_label : u < 8 ? (r.weak_label + 1) % n : rng.below(n));
      r.features = {0.0};
    }
    const ClassCount cn(n);
    const auto c = build_confusion(recs, cn);
    const std::size_t k = 2 + rng.below(n - 1);
    for (const StrategyConfig s :
         {StrategyConfig{StrategyKind::SplFull, {}}, StrategyConfig{StrategyKind::SplM, k},
          StrategyConfig{StrategyKind::SplD, k}, StrategyConfig{StrategyKind::SplB, {}}}) {
      const auto space = build_label_space(c, s);
      const auto out = relabel(recs, space);
      std::vector<std::uint64_t> hist(space.num_classes(), 0);
      for (const auto& r : out) ++hist[*r.pseudo_label];
      ch.expect(std::equal(hist.begin(), hist.end(), space.class_counts().begin()),
                fmt("trial %d %s class counts", trial, s.label().c_str()));
      if (s.kind == StrategyKind::SplD) {
        ch.expect(out.size() == space.selected_count(), fmt("trial %d spl-d mass", trial));
      } else {
        ch.expect(out.size() == recs.size(), fmt("trial %d %s mass", trial, s.label().c_str()));
      }
    }
    const auto weak = relabel_baseline(recs, StrategyKind::WeakLabel, cn);
    const auto teach = relabel_baseline(recs, StrategyKind::TeacherPred, cn);
    const auto agree = relabel_baseline(recs, StrategyKind::AgreementFilter, cn);
    ch.expect(weak.size() == recs.size() && teach.size() == recs.size(), fmt("trial %d baseline mass", trial));
    for (std::size_t i = 0; i < recs.size(); ++i) {
      ch.expect(*weak[i].pseudo_label == recs[i].weak_label, "weak label copy");
      ch.expect(*teach[i].pseudo_label == *recs[i].teacher_pred, "teacher copy");
    }
    ch.expect(agree.size() == c.diagonal_total(), fmt("trial %d agreement mass", trial));
  }
  return ch;
}

Check calibration() {
  Check ch;
  for (const double p : {0.2, 0.4, 0.6}) {
    CorpusSpec s;
    s.n = 4;
    s.feature_dim = 8;
    s.videos_per_class = 200;
    s.clips_per_video = 10;
    s.temporal_noise_p = p;
    s.seed = 19;
    s.prototype_seed = 19;
    const auto corpus = generate_web_corpus(s);
    const auto m = build_true_vs_weak(corpus.records, ClassCount(4));
    const double off = 1.0 - static_cast<double>(m.diagonal_total()) / static_cast<double>(m.total());
    ch.expect(m.total() == 8000 && std::abs(off - p) <= 0.03, fmt("p=%.1f measured %.4f", p, off));
  }
  return ch;
}

Dataset random_batch(Rng& rng, std::size_t size, std::size_t dim, std::size_t classes) {
  Dataset d;
  d.feature_dim = dim;
  std::vector<double> x(dim);
  for (std::size_t i = 0; i < size; ++i) {
    for (auto& v : x) v = rng.normal();
    d.add(x, static_cast<ClassId>(rng.below(classes)));
  }
  return d;
}

Check gradients() {
  Check ch;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed + 100);
    const auto batch = random_batch(rng, 16, 6, 5);
    LinearSoftmaxModel lin(5, 6);
    lin.initialize(seed);
    MlpModel mlp(5, 6, 8);
    mlp.initialize(seed);
    for (int pass = 0; pass < 2; ++pass) {
      const double a = gradient_check(lin, batch, 1e-5);
      const double b = gradient_check(mlp, batch, 1e-5);
      worst = std::max({worst, a, b});
      ch.expect(a < 1e-4 && b < 1e-4, fmt("seed %llu rel err %.3g / %.3g", static_cast<unsigned long long>(seed), a, b));
      for (double& p : lin.parameters()) p += 0.5 * rng.normal();
      for (double& p : mlp.parameters()) p += 0.5 * rng.normal();
    }
  }
  if (ch.ok) ch.detail = fmt("max rel err %.3g", worst);
  return ch;
}

Check uniform_loss() {
  Check ch;
  Rng rng(6);
  for (const std::size_t classes : {2u, 3u, 10u, 40u, 100u}) {
    const auto batch = random_batch(rng, 1 + rng.below(64), 7, classes);
    LinearSoftmaxModel lin(classes, 7);
    MlpModel mlp(classes, 7, 32);
    for (double& p : lin.parameters()) p = 0.0;
    for (double& p : mlp.parameters()) p = 0.0;
    const double want = std::log(static_cast<double>(classes));
    ch.expect(std::abs(cross_entropy_loss(lin, batch) - want) <= 1e-9, fmt("linear C=%zu", classes));
    ch.expect(std::abs(cross_entropy_loss(mlp, batch) - want) <= 1e-9, fmt("mlp C=%zu", classes));
  }
  return ch;
}

Check headline_trend() {
  Check ch;
  const auto cfg = benchmark_config();
  const auto table = compare_strategies(cfg);
  std::map<std::string, double> mean;
  for (const auto& row : table.rows) mean[row.arm] = row.top1_mean;
  const double base = mean.at("no-pretrain");
  for (const auto& row : table.rows) {
    if (row.arm == "no-pretrain") continue;
    ch.expect(row.top1_mean >= base + 0.01, fmt("%s %.4f vs no-pretrain %.4f", row.arm.c_str(), row.top1_mean, base));
  }
  const double b = mean.at("spl-b"), w = mean.at("weak-label");
  ch.expect(b >= w - 0.005, fmt("spl-b %.4f vs weak-label %.4f", b, w));
  std::map<std::uint64_t, double> bs, ws;
  for (const auto& r : table.runs) {
    if (r.arm == "spl-b") bs[r.seed] = r.final_eval.top1;
    if (r.arm == "weak-label") ws[r.seed] = r.final_eval.top1;
  }
  int wins = 0;
  for (const auto& [seed, acc] : bs) wins += acc >= ws.at(seed);
  ch.expect(wins >= 3, fmt("spl-b >= weak-label in %d of %zu seeds", wins, bs.size()));
  if (ch.ok) ch.detail = fmt("no-pretrain %.4f, spl-b %.4f, weak-label %.4f, wins %d/5", base, b, w, wins);
  return ch;
}

Check subsumption() {
  Check ch;
  const auto cfg = benchmark_config();
  const std::size_t n = cfg.n().value();
  for (const auto seed : cfg.seeds) {
    const auto up = prepare_upstream(cfg, seed);
    const auto full = run_arm(cfg, up, StrategyConfig{StrategyKind::SplFull, {}});
    const auto d = run_arm(cfg, up, StrategyConfig{StrategyKind::SplD, n});
    ch.expect(full.result.final_eval == d.result.final_eval && full.result.final_map == d.result.final_map,
              fmt("seed %llu: %.6f vs %.6f", static_cast<unsigned long long>(seed), full.result.final_eval.top1,
                  d.result.final_eval.top1));
  }
  return ch;
}

Check map_hand_check() {
  Check ch;
  const ScoreMatrix s{1, {0.9, 0.5, 0.1}};
  const std::vector<ClassId> y{0, 1, 0};
  ch.expect(average_precision(s, y, 0) == 5.0 / 6.0, "AP != 5/6");

  Rng rng(9);
  const std::size_t n = 300, c = 5;
  std::vector<ClassId> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<ClassId>(i % c);
  ScoreMatrix m{c, std::vector<double>(n * c)};
  for (auto& v : m.scores) v = rng.uniform();
  const double base = mean_ap_excluding_background(m, labels, ClassId{0});
  for (int trial = 0; trial < 20; ++trial) {
    for (std::size_t i = 0; i < n; ++i) m.scores[i * c] = rng.uniform() * 10.0;
    ch.expect(mean_ap_excluding_background(m, labels, ClassId{0}) == base, fmt("trial %d moved", trial));
  }
  return ch;
}

int run_shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Check cli_determinism() {
  Check ch;
  const auto dir = fs::temp_directory_path() / "spl-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (const char* sub : {"a", "b"}) {
    const auto out = dir / sub;
    const int code = run_shell(std::string("'" SPL_CLI_PATH "' experiment --seeds 1,2,3,4,5 -o '") + out.string() +
                               "' > /dev/null");
    ch.expect(code == 0, fmt("experiment %s exited %d", sub, code));
  }
  if (ch.ok) {
    const auto a = read_text(dir / "a" / "report.json");
    const auto b = read_text(dir / "b" / "report.json");
    ch.expect(!a.empty() && a == b, "report.json differs");
    if (ch.ok) ch.detail = fmt("%zu bytes identical", a.size());
  }
  fs::remove_all(dir);
  return ch;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Check()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "spl-full mapping is a bijection for N = 2..32", 1.0, bijection},
      {2, "label-space sizes, diagonal ids and frequency selection (200 matrices)", 5.0, label_space_contracts},
      {3, "relabel conservation on 100 random corpora", 5.0, conservation},
      {4, "simulator noise within 0.03 of p in {0.2, 0.4, 0.6}", 10.0, calibration},
      {5, "analytic gradients match finite differences (< 1e-4, 10 seeds)", 10.0, gradients},
      {6, "zero-initialized loss equals ln(C) within 1e-9", 1.0, uniform_loss},
      {7, "benchmark trend: pre-training helps, spl-b >= weak-label", 300.0, headline_trend},
      {8, "spl-d at K = N reproduces spl final accuracy exactly", 60.0, subsumption},
      {9, "mAP hand example is 5/6 and background-invariant", 1.0, map_hand_check},
      {10, "two experiment runs give byte-identical report.json", 600.0, cli_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check result;
    try {
      result = c.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (result.ok && secs >= c.budget_s) {
      result.ok = false;
      result.detail = fmt("took %.2fs, budget %.0fs", secs, c.budget_s);
    }
    failures += !result.ok;
    std::printf("%s [%d] %s (%.2fs)%s%s\n", result.ok ? "PASS" : "FAIL", c.id, c.name, secs,
                result.detail.empty() ? "" : ": ", result.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

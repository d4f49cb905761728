// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "spl/confusion.hpp"
#include "spl/corpus.hpp"
#include "spl/metrics.hpp"
#include "spl/train.hpp"
#include "test_support.hpp"

using namespace spl;
using spl::testing::error_kind;

namespace {

CorpusSpec small_spec(std::size_t n, double p, std::uint64_t seed) {
  CorpusSpec s;
  s.n = n;
  s.feature_dim = 8;
  s.videos_per_class = 50;
  s.clips_per_video = 10;
  s.temporal_noise_p = p;
  s.seed = seed;
  s.prototype_seed = seed;
  return s;
}

double off_diagonal_fraction(const RecordSet& recs) {
  std::size_t off = 0;
  for (const auto& r : recs) off += *r.true_label != r.weak_label;
  return static_cast<double>(off) / static_cast<double>(recs.size());
}

}  // namespace

TEST_SUITE("corpus_sim") {

TEST_CASE("prototypes have the requested norm and are deterministic") {
  const auto m = make_prototypes(2, 2, 5.0, 1);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::hypot(m(i, 0), m(i, 1)) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(make_prototypes(2, 2, 5.0, 1) == m);
  CHECK_FALSE(make_prototypes(2, 2, 5.0, 2) == m);

  const auto p = make_prototypes(10, 8, 1.0, 4);
  double min_dist = INFINITY;
  for (std::size_t a = 0; a < 10; ++a) {
    for (std::size_t b = a + 1; b < 10; ++b) {
      double s = 0.0;
      for (std::size_t j = 0; j < 8; ++j) s += (p(a, j) - p(b, j)) * (p(a, j) - p(b, j));
      min_dist = std::min(min_dist, std::sqrt(s));
    }
  }
  CHECK(min_dist > 0.0);
}

TEST_CASE("p = 0 gives a clean corpus") {
  const auto c = generate_web_corpus(small_spec(4, 0.0, 3));
  for (const auto& r : c.records) CHECK(*r.true_label == r.weak_label);
  const auto m = build_true_vs_weak(c.records, ClassCount(4));
  CHECK(m.diagonal_total() == m.total());
}

TEST_CASE("noise calibration at p = 0.4") {
  const auto c = generate_web_corpus(small_spec(4, 0.4, 3));
  REQUIRE(c.records.size() == 2000);
  const double f = off_diagonal_fraction(c.records);
  CHECK(f >= 0.37);
  CHECK(f <= 0.43);
}

TEST_CASE("noise calibration at 2,000 clips per class") {
  for (const double p : {0.2, 0.4, 0.6}) {
    auto spec = small_spec(4, p, 11);
    spec.videos_per_class = 200;
    const auto c = generate_web_corpus(spec);
    REQUIRE(c.records.size() == 8000);
    CHECK(std::abs(off_diagonal_fraction(c.records) - p) <= 0.03);
  }
}

TEST_CASE("noisy clips follow the relatedness rows") {
  auto spec = small_spec(3, 0.5, 6);
  spec.videos_per_class = 300;
  spec.relatedness = Matrix{3, 3, {0.0, 0.9, 0.1, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0}};
  const auto c = generate_web_corpus(spec);
  const auto m = build_true_vs_weak(c.records, ClassCount(3));
  // Row 0: of the noisy clips about 90% show class 1.
  const double share = static_cast<double>(m.at(0, 1)) / static_cast<double>(m.at(0, 1) + m.at(0, 2));
  CHECK(share == doctest::Approx(0.9).epsilon(0.05));
  CHECK(m.at(2, 1) == 0);
}

TEST_CASE("default relatedness uses the two nearest prototypes") {
  const auto protos = make_prototypes(6, 4, 1.0, 8);
  const auto rel = nearest_neighbor_relatedness(protos);
  for (std::size_t a = 0; a < 6; ++a) {
    std::map<double, std::size_t> by_dist;
    for (std::size_t b = 0; b < 6; ++b) {
      if (a == b) continue;
      double s = 0.0;
      for (std::size_t j = 0; j < 4; ++j) s += (protos(a, j) - protos(b, j)) * (protos(a, j) - protos(b, j));
      by_dist[s] = b;
    }
    auto it = by_dist.begin();
    const std::size_t first = it->second;
    const std::size_t second = (++it)->second;
    double row = 0.0;
    for (std::size_t b = 0; b < 6; ++b) {
      row += rel(a, b);
      const double want = (b == first || b == second) ? 0.5 : 0.0;
      CHECK(rel(a, b) == want);
    }
    CHECK(row == 1.0);
  }
}

TEST_CASE("corpus structure: balance, ids, determinism") {
  const auto spec = small_spec(5, 0.3, 2);
  const auto c = generate_web_corpus(spec);
  std::map<ClassId, std::size_t> per_class;
  std::map<std::string, std::set<ClassId>> video_labels;
  for (const auto& r : c.records) {
    ++per_class[r.weak_label];
    video_labels[r.video_id].insert(r.weak_label);
    CHECK(r.true_label.has_value());
    CHECK(r.features.size() == 8);
    CHECK_FALSE(r.teacher_pred.has_value());
  }
  for (const auto& [cls, count] : per_class) CHECK(count == 500);
  CHECK(video_labels.size() == 250);
  for (const auto& [v, labels] : video_labels) CHECK(labels.size() == 1);
  CHECK(generate_web_corpus(spec).records == c.records);
  CHECK(c.records.front().clip_id == "web-c000-v00000-k000");
}

TEST_CASE("background mode uses its own noise rate for class 0") {
  auto spec = small_spec(4, 0.5, 9);
  spec.videos_per_class = 100;
  spec.background_mode = true;
  spec.background_noise_p = 0.05;
  const auto c = generate_web_corpus(spec);
  std::size_t bg = 0, bg_noisy = 0;
  for (const auto& r : c.records) {
    if (r.weak_label != 0) continue;
    ++bg;
    bg_noisy += *r.true_label != 0;
  }
  CHECK(static_cast<double>(bg_noisy) / static_cast<double>(bg) == doctest::Approx(0.05).epsilon(0.5));
}

TEST_CASE("target set is clean and shares prototypes") {
  TargetSpec t;
  t.n = 4;
  t.feature_dim = 8;
  t.clips_per_class = 30;
  t.prototype_seed = 3;
  t.seed = 77;
  const auto target = generate_target_set(t);
  CHECK(target.records.size() == 120);
  for (const auto& r : target.records) CHECK(*r.true_label == r.weak_label);
  const auto web = generate_web_corpus(small_spec(4, 0.4, 3));
  CHECK(target.prototypes == web.prototypes);
  CHECK(target.records.front().clip_id == "target-c000-00000");
}

TEST_CASE("teacher trained on the target set labels a clean web corpus") {
  TargetSpec t;
  t.n = 4;
  t.feature_dim = 8;
  t.clips_per_class = 100;
  t.prototype_separation = 2.0;
  t.noise_std = 0.2;
  t.prototype_seed = 5;
  t.seed = 1;
  const auto target = generate_target_set(t);
  auto spec = small_spec(4, 0.0, 5);
  spec.prototype_separation = 2.0;
  spec.noise_std = 0.2;
  const auto web = generate_web_corpus(spec);
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.batch_size = 16;
  const auto teacher = train(LinearSoftmaxModel(4, 8), to_dataset(target.records, LabelField::True), cfg);
  CHECK(top_k_accuracy(teacher, web.records, 1) >= 0.95);
}

TEST_CASE("simulator settings are validated") {
  auto s = small_spec(4, 1.0, 1);
  CHECK(error_kind([&] { generate_web_corpus(s); }) == ErrorKind::InvalidSpec);
  s = small_spec(3, 0.3, 1);
  s.relatedness = Matrix{3, 3, {0.0, 0.6, 0.6, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0}};
  CHECK(error_kind([&] { generate_web_corpus(s); }) == ErrorKind::InvalidSpec);
  s.relatedness = Matrix{3, 3, {0.5, 0.5, 0.0, 0.5, 0.0, 0.5, 0.5, 0.5, 0.0}};
  CHECK(error_kind([&] { generate_web_corpus(s); }) == ErrorKind::InvalidSpec);
  s = small_spec(3, 0.3, 1);
  s.noise_std = 0.0;
  CHECK(error_kind([&] { generate_web_corpus(s); }) == ErrorKind::InvalidSpec);
}

}  // TEST_SUITE

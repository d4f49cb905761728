// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "spl/confusion.hpp"
#include "spl/corpus.hpp"
#include "spl/label_space.hpp"
#include "spl/relabel.hpp"
#include "spl/rng.hpp"
#include "test_support.hpp"

using namespace spl;
using spl::testing::make_record;
using spl::testing::random_matrix;
using spl::testing::records_from_matrix;

namespace {

// Independent oracle: pick (K-1)*N off-diagonal cells by repeated argmax with
// lexicographic tie-breaking. Returns cells in selection order.
std::vector<std::pair<std::size_t, std::size_t>> oracle_selection(const ConfusionMatrix& c, std::size_t k) {
  const std::size_t n = c.size();
  std::set<std::pair<std::size_t, std::size_t>> taken;
  std::vector<std::pair<std::size_t, std::size_t>> picked;
  for (std::size_t step = 0; step < (k - 1) * n; ++step) {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t col = 0; col < n; ++col) {
        if (r == col || taken.count({r, col})) continue;
        if (!best || c.at(r, col) > c.at(best->first, best->second)) best = std::make_pair(r, col);
      }
    }
    taken.insert(*best);
    picked.push_back(*best);
  }
  return picked;
}

}  // namespace

TEST_SUITE("relabel_core") {

TEST_CASE("build_confusion counts weak x teacher pairs") {
  const RecordSet recs{make_record("a", 0, 0), make_record("b", 0, 1), make_record("c", 1, 1),
                       make_record("d", 1, 1)};
  const auto c = build_confusion(recs, ClassCount(2));
  CHECK(c.at(0, 0) == 1);
  CHECK(c.at(0, 1) == 1);
  CHECK(c.at(1, 0) == 0);
  CHECK(c.at(1, 1) == 2);
  CHECK(c.total() == 4);
}

TEST_CASE("build_confusion on an empty stream is all zero") {
  const auto c = build_confusion({}, ClassCount(3));
  CHECK(c.total() == 0);
  CHECK(std::all_of(c.counts().begin(), c.counts().end(), [](auto v) { return v == 0; }));
}

TEST_CASE("build_confusion matches an independent tally on a simulated corpus") {
  CorpusSpec spec;
  spec.n = 10;
  spec.videos_per_class = 100;
  spec.clips_per_video = 10;
  spec.temporal_noise_p = 0.4;
  spec.seed = 7;
  spec.prototype_seed = 7;
  auto corpus = generate_web_corpus(spec);
  RecordSet& recs = corpus.records;
  REQUIRE(recs.size() == 10000);
  Rng rng(99);
  for (auto& r : recs) r.teacher_pred = rng.uniform() < 0.7 ? *r.true_label : static_cast<ClassId>(rng.below(10));

  const auto c = build_confusion(recs, ClassCount(10));
  std::map<std::pair<ClassId, ClassId>, std::uint64_t> tally;
  std::map<ClassId, std::uint64_t> per_weak;
  for (const auto& r : recs) {
    ++tally[{r.weak_label, *r.teacher_pred}];
    ++per_weak[r.weak_label];
  }
  CHECK(c.total() == 10000);
  for (std::size_t row = 0; row < 10; ++row) {
    CHECK(c.row_total(row) == per_weak[static_cast<ClassId>(row)]);
    for (std::size_t col = 0; col < 10; ++col) {
      CHECK(c.at(row, col) == tally[{static_cast<ClassId>(row), static_cast<ClassId>(col)}]);
    }
  }

  SUBCASE("order independent and shard-mergeable") {
    RecordSet shuffled = recs;
    Rng(5).shuffle(std::span<ClipRecord>(shuffled));
    CHECK(build_confusion(shuffled, ClassCount(10)) == c);
    auto merged = build_confusion(std::span<const ClipRecord>(recs).first(3333), ClassCount(10));
    merged += build_confusion(std::span<const ClipRecord>(recs).subspan(3333), ClassCount(10));
    CHECK(merged == c);
  }
}

TEST_CASE("build_confusion errors") {
  ClipRecord missing = make_record("m", 0, 0);
  missing.teacher_pred.reset();
  CHECK(spl::testing::error_kind([&] { build_confusion(RecordSet{missing}, ClassCount(2)); }) ==
        ErrorKind::MissingTeacherPred);
  CHECK(spl::testing::error_kind([&] { build_confusion(RecordSet{make_record("x", 2, 0)}, ClassCount(2)); }) ==
        ErrorKind::LabelOutOfRange);
  CHECK(spl::testing::error_kind([&] { build_confusion(RecordSet{make_record("x", 0, 5)}, ClassCount(2)); }) ==
        ErrorKind::LabelOutOfRange);
  try {
    build_confusion(RecordSet{missing}, ClassCount(2));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("m") != std::string::npos);
  }
}

TEST_CASE("noise_ratio") {
  CHECK(noise_ratio(ConfusionMatrix(ClassCount(2), {3, 1, 0, 4})) == 0.125);
  CHECK(noise_ratio(ConfusionMatrix(ClassCount(2), {3, 0, 0, 4})) == 0.0);
  CHECK(noise_ratio(ConfusionMatrix(ClassCount(2), {0, 5, 5, 0})) == 1.0);
  CHECK(spl::testing::error_kind([] { noise_ratio(ConfusionMatrix(ClassCount(3))); }) == ErrorKind::EmptyMatrix);
}

TEST_CASE("assign_spl_full follows y = N*l + t") {
  CHECK(assign_spl_full(3, 7, ClassCount(200)) == 607);
  CHECK(assign_spl_full(2, 2, ClassCount(4)) == 10);
  std::vector<ClassId> ids;
  for (std::size_t l = 0; l < 5; ++l) {
    for (std::size_t t = 0; t < 5; ++t) ids.push_back(assign_spl_full(l, t, ClassCount(5)));
  }
  std::sort(ids.begin(), ids.end());
  for (ClassId i = 0; i < 25; ++i) CHECK(ids[i] == i);
  CHECK(spl::testing::error_kind([] { assign_spl_full(5, 0, ClassCount(5)); }) == ErrorKind::LabelOutOfRange);
}

TEST_CASE("assign_spl_full is a bijection for N up to 32") {
  for (std::size_t n = 2; n <= 32; ++n) {
    std::vector<bool> hit(n * n, false);
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t t = 0; t < n; ++t) {
        const ClassId id = assign_spl_full(l, t, ClassCount(n));
        REQUIRE(id < n * n);
        CHECK_FALSE(hit[id]);
        hit[id] = true;
      }
    }
  }
}

TEST_CASE("SPL_B label space for N=2") {
  const auto space = build_label_space(ConfusionMatrix(ClassCount(2), {4, 1, 2, 3}), {StrategyKind::SplB, {}});
  CHECK(space.num_classes() == 4);
  CHECK(space.class_of(0, 0) == 0u);
  CHECK(space.class_of(1, 1) == 1u);
  CHECK(space.class_of(0, 1) == 2u);
  CHECK(space.class_of(1, 0) == 3u);
  CHECK(space.scr() == 1.0);
}

TEST_CASE("SPL_D and SPL_M on the 3x3 example") {
  const ConfusionMatrix c(ClassCount(3), {5, 2, 0, 1, 6, 3, 0, 0, 4});
  const auto d = build_label_space(c, {StrategyKind::SplD, 2});
  CHECK(d.num_classes() == 6);
  for (std::size_t w = 0; w < 3; ++w) CHECK(d.class_of(w, w) == static_cast<ClassId>(w));
  CHECK(d.class_of(1, 2) == 3u);
  CHECK(d.class_of(0, 1) == 4u);
  CHECK(d.class_of(1, 0) == 5u);
  CHECK_FALSE(d.class_of(0, 2).has_value());
  CHECK_FALSE(d.class_of(2, 0).has_value());
  CHECK_FALSE(d.class_of(2, 1).has_value());
  CHECK(d.scr() == 1.0);
  CHECK(d.discarded_count() == 0);

  const auto m = build_label_space(c, {StrategyKind::SplM, 2});
  CHECK(m.num_classes() == 6);
  CHECK(m.class_of(1, 2) == 3u);
  CHECK(m.class_of(0, 1) == 4u);
  CHECK(m.class_of(1, 0) == 5u);
  CHECK(m.class_of(0, 2) == 0u);
  CHECK(m.class_of(2, 0) == 2u);
  CHECK(m.class_of(2, 1) == 2u);
  CHECK(m.discarded_count() == 0);
  std::uint64_t sum = 0;
  for (auto v : m.class_counts()) sum += v;
  CHECK(sum == c.total());
}

TEST_CASE("label space errors") {
  const ConfusionMatrix c(ClassCount(3), {5, 2, 0, 1, 6, 3, 0, 0, 4});
  CHECK(spl::testing::error_kind([&] { build_label_space(c, {StrategyKind::SplD, std::nullopt}); }) ==
        ErrorKind::BudgetRequired);
  CHECK(spl::testing::error_kind([&] { build_label_space(c, {StrategyKind::SplM, 4}); }) == ErrorKind::BudgetTooLarge);
  CHECK(spl::testing::error_kind([&] { build_label_space(c, {StrategyKind::SplM, 1}); }) == ErrorKind::InvalidArgument);
  CHECK(spl::testing::error_kind([&] { build_label_space(c, {StrategyKind::WeakLabel, {}}); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("zero-count cells can be selected to fill the budget") {
  // Only one off-diagonal cell is non-empty but K=2 needs three.
  const ConfusionMatrix c(ClassCount(3), {5, 0, 0, 0, 6, 0, 0, 2, 4});
  const auto d = build_label_space(c, {StrategyKind::SplD, 2});
  CHECK(d.num_classes() == 6);
  CHECK(d.class_of(2, 1) == 3u);
  // Ties at zero count break by (row, col): (0,1) then (0,2).
  CHECK(d.class_of(0, 1) == 4u);
  CHECK(d.class_of(0, 2) == 5u);
  CHECK(d.class_counts()[4] == 0);
  CHECK(d.class_counts()[5] == 0);
}

TEST_CASE("SPL_FULL keeps all N^2 ids") {
  const ConfusionMatrix c(ClassCount(3), {5, 2, 0, 1, 6, 3, 0, 0, 4});
  const auto f = build_label_space(c, {StrategyKind::SplFull, {}});
  CHECK(f.num_classes() == 9);
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t t = 0; t < 3; ++t) CHECK(f.class_of(l, t) == assign_spl_full(l, t, ClassCount(3)));
  }
  CHECK(f.scr() == 1.0);
  CHECK(f.class_counts()[2] == 0);
}

TEST_CASE("relabel applies the cell map and drops discarded cells") {
  const ConfusionMatrix c3(ClassCount(3), {5, 2, 0, 1, 6, 3, 0, 0, 4});
  const auto b = build_label_space(c3, {StrategyKind::SplB, {}});
  const RecordSet one{make_record("r", 1, 2)};
  const auto out = relabel(one, b);
  REQUIRE(out.size() == 1);
  CHECK(out[0].pseudo_label == 4u);
  CHECK_FALSE(one[0].pseudo_label.has_value());

  // (0,2) is discarded under SPL_D K=2 (count 0 in the source matrix, but
  // the map applies to any record in that cell).
  const auto d = build_label_space(c3, {StrategyKind::SplD, 2});
  CHECK(relabel(RecordSet{make_record("x", 0, 2)}, d).empty());
  const auto recs = records_from_matrix(c3);
  const auto kept = relabel(recs, d);
  std::uint64_t sum = 0;
  for (auto v : d.class_counts()) sum += v;
  CHECK(kept.size() == sum);
  for (std::size_t i = 1; i < kept.size(); ++i) CHECK(kept[i - 1].clip_id < kept[i].clip_id);
}

TEST_CASE("relabel errors") {
  const auto b = build_label_space(ConfusionMatrix(ClassCount(2), {1, 1, 1, 1}), {StrategyKind::SplB, {}});
  ClipRecord r = make_record("q", 0, 1);
  r.teacher_pred.reset();
  CHECK(spl::testing::error_kind([&] { relabel(RecordSet{r}, b); }) == ErrorKind::MissingTeacherPred);
  CHECK(spl::testing::error_kind([&] { relabel(RecordSet{make_record("q", 3, 1)}, b); }) == ErrorKind::LabelOutOfRange);
  CHECK(spl::testing::error_kind([&] {
          relabel_baseline(RecordSet{r}, StrategyKind::AgreementFilter, ClassCount(2));
        }) == ErrorKind::MissingTeacherPred);
  // weak-label does not need the teacher
  CHECK(relabel_baseline(RecordSet{r}, StrategyKind::WeakLabel, ClassCount(2)).size() == 1);
}

TEST_CASE("baselines") {
  const ClassCount n(6);
  const RecordSet recs{make_record("a", 2, 5), make_record("b", 5, 5)};
  const auto weak = relabel_baseline(recs, StrategyKind::WeakLabel, n);
  CHECK(weak[0].pseudo_label == 2u);
  const auto teacher = relabel_baseline(recs, StrategyKind::TeacherPred, n);
  CHECK(teacher[0].pseudo_label == 5u);
  const auto agree = relabel_baseline(recs, StrategyKind::AgreementFilter, n);
  REQUIRE(agree.size() == 1);
  CHECK(agree[0].clip_id == "b");
  CHECK(agree[0].pseudo_label == 5u);
}

TEST_CASE("agreement filter keeps exactly the diagonal mass") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = random_matrix(rng, 2 + rng.below(8), 30);
    const auto recs = records_from_matrix(c);
    const auto kept = relabel_baseline(recs, StrategyKind::AgreementFilter, c.n());
    const auto oracle = build_confusion(recs, c.n());
    CHECK(static_cast<double>(kept.size()) / static_cast<double>(recs.size()) ==
          static_cast<double>(oracle.diagonal_total()) / static_cast<double>(oracle.total()));
  }
}

TEST_CASE("scr_curve") {
  const ConfusionMatrix c(ClassCount(3), {5, 2, 0, 1, 6, 3, 0, 0, 4});
  const std::vector<std::size_t> ks{2, 3};
  const auto pts = scr_curve(c, ks, StrategyKind::SplD);
  CHECK(pts[0].scr == 1.0);
  CHECK(pts[1].scr == 1.0);
  CHECK(pts[1].num_classes == 9);

  const ConfusionMatrix c2(ClassCount(3), {5, 2, 1, 1, 6, 3, 2, 1, 4});
  const std::vector<std::size_t> k2{2};
  const auto p2 = scr_curve(c2, k2, StrategyKind::SplM);
  CHECK(p2[0].scr == doctest::Approx(22.0 / 25.0).epsilon(1e-15));

  const ConfusionMatrix diag(ClassCount(4), {3, 0, 0, 0, 0, 5, 0, 0, 0, 0, 2, 0, 0, 0, 0, 9});
  const std::vector<std::size_t> k3{2, 3, 4};
  for (const auto& p : scr_curve(diag, k3, StrategyKind::SplD)) CHECK(p.scr == 1.0);

  const std::vector<std::size_t> bad{5};
  CHECK(spl::testing::error_kind([&] { scr_curve(c, bad, StrategyKind::SplD); }) == ErrorKind::BudgetTooLarge);
}

TEST_CASE("property: label space contracts over random matrices") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.below(12);
    const auto c = random_matrix(rng, n, 1 + rng.below(40));
    const std::size_t k = 2 + rng.below(n - 1);

    for (const auto kind : {StrategyKind::SplM, StrategyKind::SplD}) {
      const auto space = build_label_space(c, {kind, k});
      CHECK(space.num_classes() == k * n);
      for (std::size_t w = 0; w < n; ++w) CHECK(space.class_of(w, w) == static_cast<ClassId>(w));

      // Matches the repeated-argmax oracle, in id order.
      const auto picked = oracle_selection(c, k);
      std::uint64_t selected_mass = c.diagonal_total();
      for (std::size_t i = 0; i < picked.size(); ++i) {
        CHECK(space.class_of(picked[i].first, picked[i].second) == static_cast<ClassId>(n + i));
        selected_mass += c.at(picked[i].first, picked[i].second);
      }
      CHECK(space.scr() == static_cast<double>(selected_mass) / static_cast<double>(c.total()));

      // No unselected off-diagonal cell beats a selected one.
      std::uint64_t min_selected = UINT64_MAX, max_unselected = 0;
      for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t col = 0; col < n; ++col) {
          if (r == col) continue;
          if (space.is_selected(r, col)) {
            min_selected = std::min(min_selected, c.at(r, col));
          } else {
            max_unselected = std::max(max_unselected, c.at(r, col));
            if (kind == StrategyKind::SplM) CHECK(space.class_of(r, col) == static_cast<ClassId>(r));
            if (kind == StrategyKind::SplD) CHECK_FALSE(space.class_of(r, col).has_value());
          }
        }
      }
      if (k < n) CHECK(max_unselected <= min_selected);

      // Conservation.
      const auto recs = records_from_matrix(c);
      const auto out = relabel(recs, space);
      if (kind == StrategyKind::SplM) {
        CHECK(out.size() == recs.size());
      } else {
        CHECK(out.size() == space.selected_count());
        CHECK(static_cast<double>(out.size()) ==
              std::round(space.scr() * static_cast<double>(c.total())));
      }
    }

    const auto b = build_label_space(c, {StrategyKind::SplB, {}});
    CHECK(b.num_classes() == 2 * n);
    const auto recs = records_from_matrix(c);
    const auto out_b = relabel(recs, b);
    CHECK(out_b.size() == recs.size());
    for (const auto& r : out_b) CHECK((*r.pseudo_label < n) == (r.weak_label == *r.teacher_pred));

    // Agreement filter == SPL_B restricted to agreement ids.
    const auto agree = relabel_baseline(recs, StrategyKind::AgreementFilter, c.n());
    RecordSet restricted;
    for (const auto& r : out_b) {
      if (*r.pseudo_label < n) restricted.push_back(r);
    }
    CHECK(agree == restricted);

    // SPL_D at K=N is SPL_FULL up to a bijection of ids.
    const auto full = build_label_space(c, {StrategyKind::SplFull, {}});
    const auto dn = build_label_space(c, {StrategyKind::SplD, n});
    std::map<ClassId, ClassId> forward;
    std::set<ClassId> images;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t col = 0; col < n; ++col) {
        const ClassId a = *full.class_of(r, col);
        const ClassId d_id = *dn.class_of(r, col);
        CHECK(forward.emplace(a, d_id).first->second == d_id);
        images.insert(d_id);
      }
    }
    CHECK(images.size() == n * n);
    CHECK(dn.scr() == 1.0);
  }
}

TEST_CASE("determinism: repeated construction is identical") {
  Rng rng(3);
  const auto c = random_matrix(rng, 9, 25);
  const auto a = build_label_space(c, {StrategyKind::SplM, 3});
  const auto b = build_label_space(c, {StrategyKind::SplM, 3});
  for (std::size_t r = 0; r < 9; ++r) {
    for (std::size_t col = 0; col < 9; ++col) CHECK(a.class_of(r, col) == b.class_of(r, col));
  }
}

TEST_CASE("label space constructor rejects inconsistent maps") {
  const ClassCount n(2);
  // SPL_B with the disagreement ids swapped.
  CHECK(spl::testing::error_kind([&] {
          SplLabelSpace(StrategyConfig{StrategyKind::SplB, {}}, n, 4, {0u, 3u, 2u, 1u}, {1, 1, 1, 1});
        }) == ErrorKind::InvalidArgument);
  // SPL_M may not discard.
  CHECK(spl::testing::error_kind([&] {
          SplLabelSpace(StrategyConfig{StrategyKind::SplM, 2}, n, 4, {0u, std::nullopt, 3u, 1u}, {1, 1, 1, 1});
        }) == ErrorKind::InvalidArgument);
}

TEST_CASE("strategy names round-trip") {
  for (const auto kind : {StrategyKind::SplFull, StrategyKind::SplM, StrategyKind::SplD, StrategyKind::SplB,
                          StrategyKind::WeakLabel, StrategyKind::TeacherPred, StrategyKind::AgreementFilter}) {
    CHECK(parse_strategy(strategy_name(kind)) == kind);
  }
  CHECK(spl::testing::error_kind([] { parse_strategy("spl-x"); }) == ErrorKind::BadFlag);
}

}  // TEST_SUITE

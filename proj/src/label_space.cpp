// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spl/label_space.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <utility>

namespace spl {

namespace {

constexpr std::array<std::pair<StrategyKind, std::string_view>, 7> kStrategyNames{{
    {StrategyKind::SplFull, "spl"},
    {StrategyKind::SplM, "spl-m"},
    {StrategyKind::SplD, "spl-d"},
    {StrategyKind::SplB, "spl-b"},
    {StrategyKind::WeakLabel, "weak-label"},
    {StrategyKind::TeacherPred, "teacher-pred"},
    {StrategyKind::AgreementFilter, "agreement-filter"},
}};

[[noreturn]] void invalid(const std::string& what) {
  fail(ErrorKind::InvalidArgument, "invalid label space: " + what);
}

}  // namespace

std::string_view strategy_name(StrategyKind kind) noexcept {
  for (const auto& [k, name] : kStrategyNames) {
    if (k == kind) return name;
  }
  return "?";
}

StrategyKind parse_strategy(std::string_view name) {
  for (const auto& [k, n] : kStrategyNames) {
    if (n == name) return k;
  }
  fail(ErrorKind::BadFlag, "unknown strategy '" + std::string(name) +
                               "' (expected spl, spl-m, spl-d, spl-b, weak-label, teacher-pred, "
                               "agreement-filter)");
}

bool is_spl(StrategyKind kind) noexcept {
  return kind == StrategyKind::SplFull || kind == StrategyKind::SplM ||
         kind == StrategyKind::SplD || kind == StrategyKind::SplB;
}

bool needs_budget(StrategyKind kind) noexcept {
  return kind == StrategyKind::SplM || kind == StrategyKind::SplD;
}

void StrategyConfig::validate(ClassCount n) const {
  if (!needs_budget(kind)) return;
  if (!k) {
    fail(ErrorKind::BudgetRequired, std::string(strategy_name(kind)) + " requires a budget K");
  }
  if (*k < 2) {
    fail(ErrorKind::InvalidArgument, "budget K must be >= 2, got " + std::to_string(*k));
  }
  if (*k > n.value()) {
    fail(ErrorKind::BudgetTooLarge, "budget K*N = " + std::to_string(*k * n.value()) +
                                        " exceeds N^2 = " + std::to_string(n.value() * n.value()));
  }
}

std::string StrategyConfig::label() const {
  std::string out(strategy_name(kind));
  if (needs_budget(kind) && k) out += "(k=" + std::to_string(*k) + ")";
  return out;
}

SplLabelSpace::SplLabelSpace(StrategyConfig strategy, ClassCount n, std::size_t num_classes,
                             std::vector<std::optional<ClassId>> cell_to_class,
                             std::vector<std::uint64_t> cell_counts)
    : strategy_(strategy),
      n_(n),
      num_classes_(num_classes),
      cell_to_class_(std::move(cell_to_class)),
      cell_counts_(std::move(cell_counts)) {
  const std::size_t N = n.value();
  if (!is_spl(strategy_.kind)) invalid("strategy " + strategy_.label() + " has no SPL space");
  strategy_.validate(n);
  if (cell_to_class_.size() != N * N || cell_counts_.size() != N * N) {
    invalid("expected " + std::to_string(N * N) + " cells");
  }

  std::size_t expected_classes = 0;
  switch (strategy_.kind) {
    case StrategyKind::SplFull: expected_classes = N * N; break;
    case StrategyKind::SplB: expected_classes = 2 * N; break;
    default: expected_classes = *strategy_.k * N; break;
  }
  if (num_classes_ != expected_classes) {
    invalid(strategy_.label() + " must have " + std::to_string(expected_classes) + " classes, got " +
            std::to_string(num_classes_));
  }

  class_counts_.assign(num_classes_, 0);
  std::vector<bool> owned(num_classes_, false);
  std::size_t selected_off_diagonal = 0;
  for (std::size_t row = 0; row < N; ++row) {
    for (std::size_t col = 0; col < N; ++col) {
      const auto& cls = cell_to_class_[row * N + col];
      const std::uint64_t count = cell_counts_[row * N + col];
      total_ += count;
      const std::string cell = "(" + std::to_string(row) + "," + std::to_string(col) + ")";
      if (!cls) {
        if (strategy_.kind != StrategyKind::SplD || row == col) invalid("cell " + cell + " cannot be discarded");
        discarded_ += count;
        continue;
      }
      if (*cls >= num_classes_) invalid("cell " + cell + " maps past num_classes");
      if (row == col && strategy_.kind != StrategyKind::SplFull && *cls != row) {
        invalid("diagonal cell " + cell + " must map to class " + std::to_string(row));
      }
      switch (strategy_.kind) {
        case StrategyKind::SplFull:
          if (*cls != row * N + col) invalid("cell " + cell + " must map to N*l+t");
          break;
        case StrategyKind::SplB:
          if (row != col && *cls != N + row) invalid("cell " + cell + " must map to N+l");
          break;
        default:
          if (row != col) {
            if (*cls >= N) {
              if (owned[*cls]) invalid("class " + std::to_string(*cls) + " owned by two cells");
              owned[*cls] = true;
              ++selected_off_diagonal;
            } else if (strategy_.kind == StrategyKind::SplD || *cls != row) {
              invalid("cell " + cell + " must merge into its row diagonal");
            }
          }
          break;
      }
      class_counts_[*cls] += count;
      if (is_selected(row, col)) selected_ += count;
    }
  }
  if (needs_budget(strategy_.kind) && selected_off_diagonal != (*strategy_.k - 1) * N) {
    invalid("expected " + std::to_string((*strategy_.k - 1) * N) + " selected off-diagonal cells, got " +
            std::to_string(selected_off_diagonal));
  }
  scr_ = total_ == 0 ? 1.0 : static_cast<double>(selected_) / static_cast<double>(total_);
}

std::size_t SplLabelSpace::index(std::size_t row, std::size_t col) const {
  if (!n_.contains(row) || !n_.contains(col)) {
    fail(ErrorKind::LabelOutOfRange,
         "cell (" + std::to_string(row) + "," + std::to_string(col) + ") outside label space");
  }
  return row * n_.value() + col;
}

std::optional<ClassId> SplLabelSpace::class_of(std::size_t row, std::size_t col) const {
  return cell_to_class_[index(row, col)];
}

bool SplLabelSpace::is_selected(std::size_t row, std::size_t col) const {
  const auto& cls = cell_to_class_[index(row, col)];
  if (!cls) return false;
  if (row == col || strategy_.kind == StrategyKind::SplFull || strategy_.kind == StrategyKind::SplB) return true;
  // spl-m / spl-d: off-diagonal cells holding a diagonal id were merged.
  return *cls >= n_.value();
}

std::uint64_t SplLabelSpace::cell_count(std::size_t row, std::size_t col) const {
  return cell_counts_[index(row, col)];
}

std::vector<std::size_t> SplLabelSpace::anchor_cells() const {
  std::vector<std::size_t> anchors(num_classes_, std::numeric_limits<std::size_t>::max());
  for (std::size_t cell = 0; cell < cell_to_class_.size(); ++cell) {
    const auto& cls = cell_to_class_[cell];
    if (cls && cell < anchors[*cls]) anchors[*cls] = cell;
  }
  return anchors;
}

ClassId assign_spl_full(std::size_t weak, std::size_t teacher, ClassCount n) {
  if (!n.contains(weak) || !n.contains(teacher)) {
    fail(ErrorKind::LabelOutOfRange, "labels (" + std::to_string(weak) + "," + std::to_string(teacher) +
                                         ") not in [0, " + std::to_string(n.value() - 1) + "]");
  }
  return static_cast<ClassId>(n.value() * weak + teacher);
}

SplLabelSpace build_label_space(const ConfusionMatrix& c, const StrategyConfig& s) {
  const ClassCount n = c.n();
  const std::size_t N = n.value();
  if (!is_spl(s.kind)) {
    fail(ErrorKind::InvalidArgument, "build_label_space: " + s.label() + " is a baseline, not an SPL strategy");
  }
  s.validate(n);

  std::vector<std::optional<ClassId>> cells(N * N);
  std::vector<std::uint64_t> counts(c.counts().begin(), c.counts().end());
  std::size_t num_classes = 0;

  switch (s.kind) {
    case StrategyKind::SplFull:
      num_classes = N * N;
      for (std::size_t cell = 0; cell < N * N; ++cell) cells[cell] = static_cast<ClassId>(cell);
      break;
    case StrategyKind::SplB:
      num_classes = 2 * N;
      for (std::size_t row = 0; row < N; ++row) {
        for (std::size_t col = 0; col < N; ++col) {
          cells[row * N + col] = static_cast<ClassId>(row == col ? row : N + row);
        }
      }
      break;
    default: {
      const std::size_t k = *s.k;
      num_classes = k * N;
      std::vector<std::size_t> off_diagonal;
      off_diagonal.reserve(N * (N - 1));
      for (std::size_t cell = 0; cell < N * N; ++cell) {
        if (cell / N != cell % N) off_diagonal.push_back(cell);
      }
      // Row-major cell index order is (row, col) lexicographic order.
      std::stable_sort(off_diagonal.begin(), off_diagonal.end(),
                       [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
      const std::size_t budget = (k - 1) * N;
      for (std::size_t row = 0; row < N; ++row) cells[row * N + row] = static_cast<ClassId>(row);
      for (std::size_t i = 0; i < off_diagonal.size(); ++i) {
        const std::size_t cell = off_diagonal[i];
        if (i < budget) {
          cells[cell] = static_cast<ClassId>(N + i);
        } else if (s.kind == StrategyKind::SplM) {
          cells[cell] = static_cast<ClassId>(cell / N);
        }
      }
      break;
    }
  }
  return SplLabelSpace(s, n, num_classes, std::move(cells), std::move(counts));
}

std::vector<ScrPoint> scr_curve(const ConfusionMatrix& c, std::span<const std::size_t> budgets,
                                StrategyKind kind) {
  if (!needs_budget(kind)) {
    fail(ErrorKind::InvalidArgument, "scr_curve applies to spl-m and spl-d only");
  }
  std::vector<ScrPoint> out;
  out.reserve(budgets.size());
  for (const std::size_t k : budgets) {
    const auto space = build_label_space(c, StrategyConfig{kind, k});
    out.push_back({k, space.num_classes(), space.scr()});
  }
  return out;
}

}  // namespace spl

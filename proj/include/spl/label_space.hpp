// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spl/confusion.hpp"
#include "spl/record.hpp"

namespace spl {

enum class StrategyKind {
  SplFull,
  SplM,
  SplD,
  SplB,
  WeakLabel,
  TeacherPred,
  AgreementFilter,
};

/// Kebab-case flag name: spl, spl-m, spl-d, spl-b, weak-label, teacher-pred,
/// agreement-filter.
std::string_view strategy_name(StrategyKind kind) noexcept;
/// Inverse of strategy_name(); throws BadFlag for unknown names.
StrategyKind parse_strategy(std::string_view name);

bool is_spl(StrategyKind kind) noexcept;
bool needs_budget(StrategyKind kind) noexcept;

struct StrategyConfig {
  StrategyKind kind = StrategyKind::SplB;
  /// Budget multiplier K (K*N classes). Used by spl-m and spl-d only.
  std::optional<std::size_t> k;

  /// Throws BudgetRequired / BudgetTooLarge / InvalidArgument.
  void validate(ClassCount n) const;
  /// "spl-b", "spl-d(k=2)", ...
  std::string label() const;

  friend bool operator==(const StrategyConfig&, const StrategyConfig&) = default;
};

/// Mapping from (weak, teacher) cells to contiguous pseudo-label ids.
///
/// In the reduced spaces (spl-m, spl-d, spl-b) diagonal cell (w,w) is class w.
/// Otherwise ids depend on the strategy:
///   spl    N*l + t
///   spl-b  N + l
///   spl-m  N.. in descending count order for selected cells; unselected
///          cells merge into their row's diagonal id
///   spl-d  same ids as spl-m for selected cells; unselected cells discarded
class SplLabelSpace {
 public:
  /// Validates every structural invariant of the strategy; throws
  /// InvalidArgument on violation. cell_to_class and cell_counts are
  /// row-major N*N.
  SplLabelSpace(StrategyConfig strategy, ClassCount n, std::size_t num_classes,
                std::vector<std::optional<ClassId>> cell_to_class,
                std::vector<std::uint64_t> cell_counts);

  const StrategyConfig& strategy() const noexcept { return strategy_; }
  ClassCount n() const noexcept { return n_; }
  std::size_t num_classes() const noexcept { return num_classes_; }

  /// nullopt means the cell is discarded.
  std::optional<ClassId> class_of(std::size_t row, std::size_t col) const;
  /// True for cells that own a class (diagonals, and off-diagonals kept by
  /// the budget). Merged and discarded cells are unselected.
  bool is_selected(std::size_t row, std::size_t col) const;
  std::uint64_t cell_count(std::size_t row, std::size_t col) const;

  std::span<const std::uint64_t> class_counts() const noexcept { return class_counts_; }
  std::uint64_t discarded_count() const noexcept { return discarded_; }
  std::uint64_t selected_count() const noexcept { return selected_; }
  std::uint64_t total() const noexcept { return total_; }
  /// Samples in selected cells / all samples (1 for an empty source matrix).
  double scr() const noexcept { return scr_; }

  /// Smallest row-major cell index mapped to each class. Gives a labeling of
  /// classes that does not depend on how ids were assigned.
  std::vector<std::size_t> anchor_cells() const;

 private:
  std::size_t index(std::size_t row, std::size_t col) const;

  StrategyConfig strategy_;
  ClassCount n_;
  std::size_t num_classes_;
  std::vector<std::optional<ClassId>> cell_to_class_;
  std::vector<std::uint64_t> cell_counts_;
  std::vector<std::uint64_t> class_counts_;
  std::uint64_t discarded_ = 0;
  std::uint64_t selected_ = 0;
  std::uint64_t total_ = 0;
  double scr_ = 1.0;
};

/// N*l + t. Throws LabelOutOfRange.
ClassId assign_spl_full(std::size_t weak, std::size_t teacher, ClassCount n);

/// Builds the label space of an SPL strategy from a confusion matrix.
/// Off-diagonal frequency ties break by ascending (row, col).
SplLabelSpace build_label_space(const ConfusionMatrix& c, const StrategyConfig& s);

struct ScrPoint {
  std::size_t k;
  std::size_t num_classes;
  double scr;
};

/// SCR for each budget K under spl-m or spl-d.
std::vector<ScrPoint> scr_curve(const ConfusionMatrix& c, std::span<const std::size_t> budgets,
                                StrategyKind kind);

}  // namespace spl

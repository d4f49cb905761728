// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spl/record.hpp"

namespace spl {

/// N x N counts of (weak label, teacher prediction) pairs. Rows are weak
/// labels, columns teacher predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(ClassCount n);
  /// Row-major counts; size must be n*n.
  ConfusionMatrix(ClassCount n, std::vector<std::uint64_t> counts);

  ClassCount n() const noexcept { return n_; }
  std::size_t size() const noexcept { return n_.value(); }

  std::uint64_t at(std::size_t row, std::size_t col) const;
  void add(std::size_t row, std::size_t col, std::uint64_t count = 1);

  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t diagonal_total() const noexcept;
  std::uint64_t row_total(std::size_t row) const;
  std::uint64_t col_total(std::size_t col) const;

  std::span<const std::uint64_t> counts() const noexcept { return counts_; }

  /// Adds another matrix over the same N. Commutative, so shards built by
  /// independent workers merge to the single-pass result.
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  ClassCount n_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

/// Tallies weak label vs teacher prediction. Throws MissingTeacherPred or
/// LabelOutOfRange naming the offending clip.
ConfusionMatrix build_confusion(std::span<const ClipRecord> records, ClassCount n);

/// Same tally against the simulator's true_label instead of teacher_pred.
ConfusionMatrix build_true_vs_weak(std::span<const ClipRecord> records, ClassCount n);

/// Off-diagonal mass / total. Throws EmptyMatrix on an empty matrix.
double noise_ratio(const ConfusionMatrix& c);

}  // namespace spl

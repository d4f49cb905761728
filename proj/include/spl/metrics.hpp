// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spl/label_space.hpp"
#include "spl/model.hpp"
#include "spl/record.hpp"

namespace spl {

struct EvalReport {
  double top1 = 0.0;
  /// Present only when the model has at least 5 classes.
  std::optional<double> top5;
  /// Top-1 accuracy per true class; 0 for classes with no samples (see
  /// per_class_support).
  std::vector<double> per_class_accuracy;
  std::vector<std::size_t> per_class_support;
  std::size_t num_samples = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Row-major (records x classes) score matrix.
struct ScoreMatrix {
  std::size_t num_classes = 0;
  std::vector<double> scores;

  std::size_t num_records() const noexcept { return num_classes == 0 ? 0 : scores.size() / num_classes; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(scores).subspan(i * num_classes, num_classes);
  }
};

/// Softmax probabilities of every record.
template <Classifier M>
ScoreMatrix score_records(const M& model, std::span<const ClipRecord> records);

/// True if `label` ranks within the top k of `scores`, where ties rank the
/// lower class index first.
bool in_top_k(std::span<const double> scores, std::size_t label, std::size_t k);

/// Fraction of records whose true_label ranks in the model's top k.
/// Throws MissingTrueLabel or KOutOfRange.
template <Classifier M>
double top_k_accuracy(const M& model, std::span<const ClipRecord> records, std::size_t k);

double top_k_accuracy(const ScoreMatrix& scores, std::span<const ClipRecord> records, std::size_t k);

template <Classifier M>
EvalReport evaluate(const M& model, std::span<const ClipRecord> records);

EvalReport evaluate(const ScoreMatrix& scores, std::span<const ClipRecord> records);

/// Mean over non-background classes of non-interpolated average precision:
/// records ranked by score descending (ties keep input order), AP = mean of
/// precision at each positive's rank. Throws NoPositives.
double mean_ap_excluding_background(const ScoreMatrix& scores, std::span<const ClassId> true_labels,
                                    std::optional<ClassId> background_class);

/// AP of one class column.
double average_precision(const ScoreMatrix& scores, std::span<const ClassId> true_labels, ClassId cls);

struct ClassDistribution {
  std::vector<std::uint64_t> class_counts;
  std::uint64_t total = 0;
  double median = 0.0;
  /// Classes with count strictly above / below the median.
  std::size_t head_classes = 0;
  std::size_t tail_classes = 0;
  std::vector<ClassId> empty_classes;
  /// In-diagonal (id < N) vs off-diagonal mass.
  std::uint64_t diagonal_mass = 0;
  std::uint64_t off_diagonal_mass = 0;
};

/// Histogram of pseudo labels over [0, num_classes). Throws
/// MissingPseudoLabel or LabelOutOfRange. The first overload counts ids < n
/// as in-diagonal (true for spl-m, spl-d, spl-b and the baselines); the
/// second asks the space which ids its diagonal cells carry.
ClassDistribution class_distribution(std::span<const ClipRecord> records, std::size_t num_classes,
                                     std::size_t n);
ClassDistribution class_distribution(std::span<const ClipRecord> records, const SplLabelSpace& space);

}  // namespace spl

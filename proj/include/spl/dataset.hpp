// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "spl/record.hpp"

namespace spl {

/// Dense (features, label) training set, row-major features.
struct Dataset {
  std::size_t feature_dim = 0;
  std::vector<double> features;
  std::vector<ClassId> labels;

  std::size_t size() const noexcept { return labels.size(); }
  bool empty() const noexcept { return labels.empty(); }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * feature_dim, feature_dim);
  }

  void add(std::span<const double> x, ClassId label);
};

enum class LabelField { Weak, Teacher, True, Pseudo };

/// Extracts one label field from every record. Throws the matching Missing*
/// error when a record lacks the field and DimensionMismatch on ragged
/// feature vectors.
Dataset to_dataset(std::span<const ClipRecord> records, LabelField field);

}  // namespace spl

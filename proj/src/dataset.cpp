// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spl/dataset.hpp"

#include <string>

namespace spl {

void Dataset::add(std::span<const double> x, ClassId label) {
  if (labels.empty() && feature_dim == 0) feature_dim = x.size();
  if (x.size() != feature_dim) {
    fail(ErrorKind::DimensionMismatch, "sample has " + std::to_string(x.size()) + " features, expected " +
                                           std::to_string(feature_dim));
  }
  features.insert(features.end(), x.begin(), x.end());
  labels.push_back(label);
}

Dataset to_dataset(std::span<const ClipRecord> records, LabelField field) {
  Dataset data;
  if (!records.empty()) data.feature_dim = records.front().features.size();
  data.features.reserve(records.size() * data.feature_dim);
  data.labels.reserve(records.size());
  for (const auto& r : records) {
    std::optional<ClassId> label;
    switch (field) {
      case LabelField::Weak: label = r.weak_label; break;
      case LabelField::Teacher:
        if (!r.teacher_pred) fail(ErrorKind::MissingTeacherPred, "clip " + r.clip_id + " has no teacher_pred");
        label = r.teacher_pred;
        break;
      case LabelField::True:
        if (!r.true_label) fail(ErrorKind::MissingTrueLabel, "clip " + r.clip_id + " has no true_label");
        label = r.true_label;
        break;
      case LabelField::Pseudo:
        if (!r.pseudo_label) fail(ErrorKind::MissingPseudoLabel, "clip " + r.clip_id + " has no pseudo_label");
        label = r.pseudo_label;
        break;
    }
    data.add(r.features, *label);
  }
  return data;
}

}  // namespace spl

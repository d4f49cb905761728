// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spl/relabel.hpp"

#include <string>

namespace spl {

namespace {

ClassId checked(const ClipRecord& r, ClassId label, ClassCount n, const char* field) {
  if (!n.contains(label)) {
    fail(ErrorKind::LabelOutOfRange, "clip " + r.clip_id + ": " + field + " " + std::to_string(label) +
                                         " not in [0, " + std::to_string(n.value() - 1) + "]");
  }
  return label;
}

ClassId teacher_of(const ClipRecord& r, ClassCount n) {
  if (!r.teacher_pred) fail(ErrorKind::MissingTeacherPred, "clip " + r.clip_id + " has no teacher_pred");
  return checked(r, *r.teacher_pred, n, "teacher_pred");
}

}  // namespace

RecordSet relabel(std::span<const ClipRecord> records, const SplLabelSpace& space) {
  const ClassCount n = space.n();
  RecordSet out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const ClassId weak = checked(r, r.weak_label, n, "weak_label");
    const ClassId teacher = teacher_of(r, n);
    const auto cls = space.class_of(weak, teacher);
    if (!cls) continue;
    ClipRecord& copy = out.emplace_back(r);
    copy.pseudo_label = *cls;
  }
  return out;
}

RecordSet relabel_baseline(std::span<const ClipRecord> records, StrategyKind kind, ClassCount n) {
  if (is_spl(kind)) {
    fail(ErrorKind::InvalidArgument,
         "relabel_baseline: " + std::string(strategy_name(kind)) + " is an SPL strategy");
  }
  RecordSet out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const ClassId weak = checked(r, r.weak_label, n, "weak_label");
    ClassId label = weak;
    if (kind == StrategyKind::TeacherPred) {
      label = teacher_of(r, n);
    } else if (kind == StrategyKind::AgreementFilter) {
      if (teacher_of(r, n) != weak) continue;
    }
    ClipRecord& copy = out.emplace_back(r);
    copy.pseudo_label = label;
  }
  return out;
}

RecordSet apply_strategy(std::span<const ClipRecord> records, const StrategyConfig& strategy,
                         ClassCount n, const SplLabelSpace* space) {
  if (!is_spl(strategy.kind)) return relabel_baseline(records, strategy.kind, n);
  if (space == nullptr) {
    fail(ErrorKind::InvalidArgument, strategy.label() + " requires a label space");
  }
  if (space->n() != n) fail(ErrorKind::DimensionMismatch, "label space built for a different N");
  return relabel(records, *space);
}

}  // namespace spl

// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spl/error.hpp"

namespace spl {

using ClassId = std::uint32_t;

/// Number of target classes. Always at least 2.
class ClassCount {
 public:
  explicit ClassCount(std::size_t n) : n_(n) {
    if (n < 2) fail(ErrorKind::InvalidArgument, "class count must be >= 2, got " + std::to_string(n));
  }

  std::size_t value() const noexcept { return n_; }
  bool contains(std::size_t label) const noexcept { return label < n_; }

  friend bool operator==(ClassCount, ClassCount) = default;

 private:
  std::size_t n_;
};

/// One clip sample. teacher_pred / true_label / pseudo_label are filled by
/// later stages (or by the simulator, for true_label).
struct ClipRecord {
  std::string clip_id;
  std::string video_id;
  ClassId weak_label = 0;
  std::optional<ClassId> teacher_pred;
  std::vector<double> features;
  std::optional<ClassId> true_label;
  std::optional<ClassId> pseudo_label;

  friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

using RecordSet = std::vector<ClipRecord>;

}  // namespace spl

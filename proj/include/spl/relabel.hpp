// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>

#include "spl/label_space.hpp"
#include "spl/record.hpp"

namespace spl {

/// Assigns pseudo_label from the space's cell map. Records in discarded cells
/// are dropped; order is preserved and the input is not modified.
RecordSet relabel(std::span<const ClipRecord> records, const SplLabelSpace& space);

/// weak-label, teacher-pred or agreement-filter. Label space size is N.
RecordSet relabel_baseline(std::span<const ClipRecord> records, StrategyKind kind, ClassCount n);

/// Dispatches to relabel() or relabel_baseline(). `space` is required for SPL
/// strategies and ignored otherwise.
RecordSet apply_strategy(std::span<const ClipRecord> records, const StrategyConfig& strategy,
                         ClassCount n, const SplLabelSpace* space);

}  // namespace spl

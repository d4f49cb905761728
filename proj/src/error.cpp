// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spl/error.hpp"

namespace spl {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::BadFlag: return "BadFlag";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::MissingTeacherPred: return "MissingTeacherPred";
    case ErrorKind::MissingTrueLabel: return "MissingTrueLabel";
    case ErrorKind::MissingPseudoLabel: return "MissingPseudoLabel";
    case ErrorKind::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::BudgetRequired: return "BudgetRequired";
    case ErrorKind::BudgetTooLarge: return "BudgetTooLarge";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::KOutOfRange: return "KOutOfRange";
    case ErrorKind::NoPositives: return "NoPositives";
    case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::Internal: return "Internal";
  }
  return "Internal";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::BadFlag:
    case ErrorKind::InvalidArgument:
    case ErrorKind::BudgetRequired:
    case ErrorKind::BudgetTooLarge:
    case ErrorKind::InvalidSpec:
    case ErrorKind::KOutOfRange:
      return 2;
    case ErrorKind::FormatError:
    case ErrorKind::MissingTeacherPred:
    case ErrorKind::MissingTrueLabel:
    case ErrorKind::MissingPseudoLabel:
    case ErrorKind::LabelOutOfRange:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::EmptyMatrix:
    case ErrorKind::EmptyDataset:
    case ErrorKind::NoPositives:
      return 3;
    case ErrorKind::NonFiniteLoss:
      return 4;
    case ErrorKind::Internal:
      return 5;
    case ErrorKind::FileNotFound:
      return 6;
  }
  return 5;
}

}  // namespace spl

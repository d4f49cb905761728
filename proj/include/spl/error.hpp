// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spl {

/// Error categories raised by the library. Each maps to one CLI exit code
/// (see exit_code()).
enum class ErrorKind {
  BadFlag,
  InvalidArgument,
  FileNotFound,
  FormatError,
  MissingTeacherPred,
  MissingTrueLabel,
  MissingPseudoLabel,
  LabelOutOfRange,
  DimensionMismatch,
  EmptyMatrix,
  EmptyDataset,
  BudgetRequired,
  BudgetTooLarge,
  InvalidSpec,
  KOutOfRange,
  NoPositives,
  NonFiniteLoss,
  Internal,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Process exit code for an error category: 2 usage, 3 format/data,
/// 4 numeric divergence, 5 internal, 6 missing file.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace spl

// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#include "spl/confusion.hpp"

#include <numeric>
#include <string>

namespace spl {

ConfusionMatrix::ConfusionMatrix(ClassCount n)
    : n_(n), counts_(n.value() * n.value(), 0) {}

ConfusionMatrix::ConfusionMatrix(ClassCount n, std::vector<std::uint64_t> counts)
    : n_(n), counts_(std::move(counts)) {
  if (counts_.size() != n.value() * n.value()) {
    fail(ErrorKind::DimensionMismatch,
         "confusion matrix needs " + std::to_string(n.value() * n.value()) + " cells, got " +
             std::to_string(counts_.size()));
  }
  total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::at(std::size_t row, std::size_t col) const {
  if (!n_.contains(row) || !n_.contains(col)) {
    fail(ErrorKind::LabelOutOfRange,
         "cell (" + std::to_string(row) + "," + std::to_string(col) + ") outside " +
             std::to_string(size()) + "x" + std::to_string(size()) + " matrix");
  }
  return counts_[row * size() + col];
}

void ConfusionMatrix::add(std::size_t row, std::size_t col, std::uint64_t count) {
  if (!n_.contains(row) || !n_.contains(col)) {
    fail(ErrorKind::LabelOutOfRange,
         "cell (" + std::to_string(row) + "," + std::to_string(col) + ") outside " +
             std::to_string(size()) + "x" + std::to_string(size()) + " matrix");
  }
  counts_[row * size() + col] += count;
  total_ += count;
}

std::uint64_t ConfusionMatrix::diagonal_total() const noexcept {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < size(); ++i) sum += counts_[i * size() + i];
  return sum;
}

std::uint64_t ConfusionMatrix::row_total(std::size_t row) const {
  std::uint64_t sum = 0;
  for (std::size_t col = 0; col < size(); ++col) sum += at(row, col);
  return sum;
}

std::uint64_t ConfusionMatrix::col_total(std::size_t col) const {
  std::uint64_t sum = 0;
  for (std::size_t row = 0; row < size(); ++row) sum += at(row, col);
  return sum;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.n_ != n_) {
    fail(ErrorKind::DimensionMismatch, "cannot merge confusion matrices of different N");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  total_ += other.total_;
  return *this;
}

namespace {

void check_label(const ClipRecord& r, std::size_t label, ClassCount n, const char* field) {
  if (!n.contains(label)) {
    fail(ErrorKind::LabelOutOfRange,
         "clip " + r.clip_id + ": " + field + " " + std::to_string(label) + " not in [0, " +
             std::to_string(n.value() - 1) + "]");
  }
}

}  // namespace

ConfusionMatrix build_confusion(std::span<const ClipRecord> records, ClassCount n) {
  ConfusionMatrix c(n);
  for (const auto& r : records) {
    if (!r.teacher_pred) fail(ErrorKind::MissingTeacherPred, "clip " + r.clip_id + " has no teacher_pred");
    check_label(r, r.weak_label, n, "weak_label");
    check_label(r, *r.teacher_pred, n, "teacher_pred");
    c.add(r.weak_label, *r.teacher_pred);
  }
  return c;
}

ConfusionMatrix build_true_vs_weak(std::span<const ClipRecord> records, ClassCount n) {
  ConfusionMatrix c(n);
  for (const auto& r : records) {
    if (!r.true_label) fail(ErrorKind::MissingTrueLabel, "clip " + r.clip_id + " has no true_label");
    check_label(r, r.weak_label, n, "weak_label");
    check_label(r, *r.true_label, n, "true_label");
    c.add(r.weak_label, *r.true_label);
  }
  return c;
}

double noise_ratio(const ConfusionMatrix& c) {
  if (c.total() == 0) fail(ErrorKind::EmptyMatrix, "noise ratio of an empty confusion matrix");
  return static_cast<double>(c.total() - c.diagonal_total()) / static_cast<double>(c.total());
}

}  // namespace spl

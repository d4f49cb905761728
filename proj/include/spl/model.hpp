// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

#include "spl/record.hpp"

namespace spl {

/// Probabilities below this are clamped before taking the log.
inline constexpr double kProbabilityFloor = 1e-12;
/// Standard deviation of the Gaussian weight initializer.
inline constexpr double kInitStddev = 0.01;
inline constexpr std::size_t kDefaultHiddenWidth = 32;

/// Numerically stable softmax (max-shifted).
void softmax(std::span<const double> logits, std::span<double> probs);

/// Multinomial logistic regression, used as the teacher.
///
/// Parameters are one flat vector: weights (C x d, row-major), then biases
/// (C).
class LinearSoftmaxModel {
 public:
  struct Workspace {
    std::vector<double> logits;
    std::vector<double> probs;
  };

  LinearSoftmaxModel(std::size_t num_classes, std::size_t feature_dim);

  /// Weights ~ N(0, 0.01^2) from Rng(seed), biases zero.
  void initialize(std::uint64_t seed);

  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t feature_dim() const noexcept { return feature_dim_; }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<const double> weights() const noexcept;
  std::span<const double> biases() const noexcept;

  Workspace make_workspace() const;
  void logits(std::span<const double> x, std::span<double> out) const;
  /// Adds d(-log p_y)/d(params) into grad and returns the (clamped) loss.
  double accumulate_gradient(std::span<const double> x, ClassId y, std::span<double> grad,
                             Workspace& ws) const;

  friend bool operator==(const LinearSoftmaxModel&, const LinearSoftmaxModel&) = default;

 private:
  std::size_t num_classes_;
  std::size_t feature_dim_;
  std::vector<double> params_;
};

/// One-hidden-layer tanh network, used as the student.
///
/// Parameter layout: hidden weights (h x d), hidden biases (h), head weights
/// (C x h), head biases (C).
class MlpModel {
 public:
  struct Workspace {
    std::vector<double> hidden;
    std::vector<double> logits;
    std::vector<double> probs;
    std::vector<double> hidden_grad;
  };

  MlpModel(std::size_t num_classes, std::size_t feature_dim, std::size_t hidden_width = kDefaultHiddenWidth);

  /// All weights ~ N(0, 0.01^2) from Rng(seed) in layout order, biases zero.
  void initialize(std::uint64_t seed);

  std::size_t num_classes() const noexcept { return num_classes_; }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::size_t hidden_width() const noexcept { return hidden_width_; }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<const double> hidden_weights() const noexcept;
  std::span<const double> hidden_biases() const noexcept;
  std::span<const double> head_weights() const noexcept;
  std::span<const double> head_biases() const noexcept;
  /// Everything before the head: hidden weights and biases.
  std::span<const double> hidden_parameters() const noexcept;

  Workspace make_workspace() const;
  void logits(std::span<const double> x, std::span<double> out) const;
  double accumulate_gradient(std::span<const double> x, ClassId y, std::span<double> grad,
                             Workspace& ws) const;

  /// Reorders head rows: row i of the result is row order[i] of this model.
  MlpModel with_head_rows(std::span<const std::size_t> order) const;

  friend bool operator==(const MlpModel&, const MlpModel&) = default;

 private:
  std::size_t hidden_offset() const noexcept { return 0; }
  std::size_t head_offset() const noexcept { return hidden_width_ * (feature_dim_ + 1); }
  void hidden_forward(std::span<const double> x, std::span<double> hidden) const;

  std::size_t num_classes_;
  std::size_t feature_dim_;
  std::size_t hidden_width_;
  std::vector<double> params_;
};

template <typename M>
concept Classifier = requires(const M& m, M& mut, std::span<const double> x, std::span<double> out,
                              ClassId y, typename M::Workspace& ws) {
  { m.num_classes() } -> std::convertible_to<std::size_t>;
  { m.feature_dim() } -> std::convertible_to<std::size_t>;
  { m.parameters() } -> std::convertible_to<std::span<const double>>;
  { mut.parameters() } -> std::convertible_to<std::span<double>>;
  { m.make_workspace() } -> std::same_as<typename M::Workspace>;
  m.logits(x, out);
  { m.accumulate_gradient(x, y, out, ws) } -> std::convertible_to<double>;
};

/// Copies the hidden layer and draws a fresh head ~ N(0, 0.01^2) from
/// Rng(seed) with zero biases. Throws InvalidArgument if new_num_classes < 2.
MlpModel swap_head(const MlpModel& model, std::size_t new_num_classes, std::uint64_t seed);

}  // namespace spl

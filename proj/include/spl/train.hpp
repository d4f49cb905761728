// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spl/dataset.hpp"
#include "spl/model.hpp"

namespace spl {

struct TrainConfig {
  double learning_rate = 0.1;
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  bool shuffle = true;

  /// Throws InvalidArgument on non-positive fields.
  void validate() const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Mean over the dataset of -log max(p(label | x), 1e-12).
/// Throws DimensionMismatch (including for an empty batch) or LabelOutOfRange.
template <Classifier M>
double cross_entropy_loss(const M& model, const Dataset& batch);

/// Loss and gradient of the mean loss w.r.t. the flat parameter vector.
template <Classifier M>
double loss_and_gradient(const M& model, const Dataset& batch, std::span<double> grad);

/// Mini-batch SGD from the model's current parameters. Each epoch visits the
/// data in an order drawn from Rng(derive_seed(cfg.seed, "shuffle")) when
/// cfg.shuffle is set. Returns the full-set loss after every epoch.
/// Throws EmptyDataset, or NonFiniteLoss naming the epoch and learning rate.
template <Classifier M>
std::vector<double> fit(M& model, const Dataset& data, const TrainConfig& cfg);

/// initialize(cfg.seed) followed by fit().
template <Classifier M>
M train(M model, const Dataset& data, const TrainConfig& cfg);

struct Prediction {
  ClassId label = 0;
  std::vector<double> probabilities;
};

/// Argmax with ties to the lowest class index.
template <Classifier M>
Prediction predict(const M& model, std::span<const double> features);

/// Max relative error between analytic gradients and central differences,
/// over every parameter, with denominator max(|analytic|, |numeric|, 1e-8).
/// epsilon must lie in [1e-7, 1e-3].
template <Classifier M>
double gradient_check(const M& model, const Dataset& batch, double epsilon);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> values);

}  // namespace spl

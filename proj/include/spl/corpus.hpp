// Copyright 2026 The spl-relabel Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spl/record.hpp"

namespace spl {

/// Dense row-major real matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

/// Parameters of a simulated weakly-labeled web corpus.
///
/// Each class query retrieves `videos_per_class` videos of
/// `clips_per_video` clips. Every clip inherits the query as its weak label;
/// with probability temporal_noise_p it actually shows a related class drawn
/// from row q of `relatedness`.
struct CorpusSpec {
  std::size_t n = 10;
  std::size_t feature_dim = 16;
  std::size_t videos_per_class = 100;
  std::size_t clips_per_video = 10;
  double temporal_noise_p = 0.5;
  /// N x N, row-stochastic, zero diagonal. Empty selects the default: each
  /// class confused uniformly with its 2 nearest prototypes.
  Matrix relatedness;
  double prototype_separation = 1.0;
  double noise_std = 0.35;
  std::uint64_t prototype_seed = 0;
  std::uint64_t seed = 0;
  /// Treat class 0 as a background class whose videos use
  /// background_noise_p instead of temporal_noise_p.
  bool background_mode = false;
  double background_noise_p = 0.0;

  /// Throws InvalidSpec.
  void validate() const;

  friend bool operator==(const CorpusSpec&, const CorpusSpec&) = default;
};

/// Parameters of a clean, human-annotated style set drawn from the same
/// prototypes (weak_label == true_label everywhere).
struct TargetSpec {
  std::size_t n = 10;
  std::size_t feature_dim = 16;
  std::size_t clips_per_class = 100;
  double prototype_separation = 1.0;
  double noise_std = 0.35;
  std::uint64_t prototype_seed = 0;
  std::uint64_t seed = 0;
  /// clip_id prefix, e.g. "target" or "eval".
  std::string id_prefix = "target";

  void validate() const;

  friend bool operator==(const TargetSpec&, const TargetSpec&) = default;
};

struct SyntheticCorpus {
  RecordSet records;
  Matrix prototypes;
  /// Resolved relatedness actually used (empty for target sets).
  Matrix relatedness;
};

/// N unit directions (normalized Gaussian draws from Rng(seed)) scaled to
/// length `separation`. Throws InvalidSpec if d < 2 or the draw yields two
/// coincident vectors.
Matrix make_prototypes(std::size_t n, std::size_t d, double separation, std::uint64_t seed);

/// Each class spreads its mass uniformly over its min(2, N-1) nearest
/// prototypes (ties to the lower index).
Matrix nearest_neighbor_relatedness(const Matrix& prototypes);

SyntheticCorpus generate_web_corpus(const CorpusSpec& spec);
SyntheticCorpus generate_target_set(const TargetSpec& spec);

}  // namespace spl

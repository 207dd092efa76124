/* Copyright 2026 The QEK Lab Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef QEKL_DATA_HPP_
#define QEKL_DATA_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qekl/embedding.hpp"
#include "qekl/svm.hpp"

namespace qekl {

struct LabeledDataset {
  std::vector<Eigen::Vector2d> points;
  std::vector<int> labels;  // +-1
  std::string split;        // "train" | "test"
  std::string dataset_id;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(points.size()); }
  void validate() const;
  // Returns the first `count` points as a new dataset (id gains a suffix).
  LabeledDataset head(int count) const;
};

// Checkerboard over [0,1]^2: 4x4 grid of sites at ((2i+1)/8, (2j+1)/8) with
// class +1 iff i+j is even; points are uniform in the axis-aligned square of
// half-width 1/8 around their site. 30 train + 30 test, class-balanced,
// sites filled round-robin per class.
std::pair<LabeledDataset, LabeledDataset> gen_checkerboard(std::uint64_t seed);

// Two disks of radius sqrt(2)/2 centered at (+-1, 0), points area-uniform.
// Right disk: inside radius 1/2 labeled +1, outside -1; left disk swaps the
// labels. 60 train + 60 test, class-balanced.
std::pair<LabeledDataset, LabeledDataset> gen_symmetric_donuts(std::uint64_t seed);

// ---------------------------------------------------------------------------
// MNIST pixel datasets (IDX binary ingestion)

struct IdxImages {
  int rows = 0;
  int cols = 0;
  // one vector per image, row-major, raw bytes
  std::vector<std::vector<std::uint8_t>> images;
};

IdxImages read_idx_images(const std::string& path);
std::vector<std::uint8_t> read_idx_labels(const std::string& path);

struct MnistPixelPools {
  std::vector<Eigen::Vector2d> base_zero;
  std::vector<Eigen::Vector2d> base_one;
  std::vector<Eigen::Vector2d> zero;      // base_zero minus base_one coords
  std::vector<Eigen::Vector2d> one;       // base_one minus base_zero coords
  std::vector<Eigen::Vector2d> not_zero;  // copy of base_one
  std::vector<Eigen::Vector2d> not_one;   // copy of base_zero
};

// Selects `images_per_class` images of digit 0 and of digit 1 (seeded,
// without replacement), samples three pixels with normalized gray value
// > 0.95 from each and assembles the coordinate pools. Images with fewer
// than three qualifying pixels are skipped and replaced by further draws.
// Pixel (row r, col c) maps to coordinates (c, 27 - r) / 27 in [0,1]^2.
MnistPixelPools load_mnist_pixels(const std::string& images_path,
                                  const std::string& labels_path,
                                  std::uint64_t seed, int images_per_class = 500);

// ---------------------------------------------------------------------------
// Ensemble classification of whole images

struct EnsembleUndecided : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A trained QEK classifier: kernel rows against its training set are
// computed from the stored embedding parameters.
struct KernelClassifier {
  SvmModel model;
  LabeledDataset train;
  ParameterVector theta;
  AnsatzShape shape;
};

int classify_point(const KernelClassifier& clf, const Eigen::Vector2d& x);

struct VoteOutcome {
  bool decided = false;
  int cls = -1;  // 0 or 1 when decided
};

// Majority vote with the two-vote margin rule: decided only when the
// absolute vote difference is at least 2.
VoteOutcome majority_vote(int votes_zero, int votes_one);

// Classifies one 28x28 image as digit 0 or 1. Samples 15 qualifying pixels
// (gray > 0.95), votes each pixel "zero" when the zero-vs-not-zero model
// says zero and the one-vs-not-one model says not-one (symmetrically for
// "one"; conflicting outputs abstain). A vote margin below 2 triggers a
// resample with fresh pixels; after `max_attempts` the image is Undecided.
int ensemble_classify(const std::vector<std::uint8_t>& image,
                      const KernelClassifier& zero_model,
                      const KernelClassifier& one_model, std::uint64_t seed,
                      int max_attempts = 8);

}  // namespace qekl

#endif  // QEKL_DATA_HPP_

// Copyright 2026 The PrivFusion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef PRIVFUSION_DATA_DATASET_H_
#define PRIVFUSION_DATA_DATASET_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "common/matrix.h"

namespace privfusion::data {

// Inputs are scaled to [0, 1]; one row per sample.
struct LabeledDataset {
  Matrix inputs;
  std::vector<int> labels;
  int class_count = 0;

  size_t size() const { return labels.size(); }
  size_t input_dim() const { return static_cast<size_t>(inputs.cols()); }
  void Validate() const;
  size_t CountLabel(int label) const;
};

enum class PartitionKind { kHomogeneous, kHeterogeneous };

struct PartitionPlan {
  PartitionKind kind = PartitionKind::kHomogeneous;
  int personalized_label = 4;
  double minority_fraction = 0.2;
};

// Rows selected by index, in the given order.
LabeledDataset Subset(const LabeledDataset& data, const std::vector<size_t>& rows);

// Big-endian IDX files: magic 2051 (images, u8 pixels / 255) and 2049 (labels).
LabeledDataset LoadIdx(const std::string& images_path,
                       const std::string& labels_path, int class_count = 10);

// Gaussian clusters around seeded centers drawn uniformly from [0.25, 0.75]^d;
// samples are clamped to [0, 1]. Sample order interleaves classes.
LabeledDataset SynthBlobs(int class_count, int per_class, int input_dim,
                          double spread, uint64_t seed);

// Homogeneous: per-class seeded shuffle split in halves (per-class counts
// differ by at most one). Heterogeneous: A holds every personalized_label
// sample plus round(minority_fraction * rest) of the rest, B holds the
// remainder with personalized_label excluded.
std::pair<LabeledDataset, LabeledDataset> Partition(const LabeledDataset& data,
                                                    const PartitionPlan& plan,
                                                    uint64_t seed);

// Index form of Partition; the two index sets are disjoint and cover data.
std::pair<std::vector<size_t>, std::vector<size_t>> PartitionIndices(
    const LabeledDataset& data, const PartitionPlan& plan, uint64_t seed);

// Stratified probe: round-robin over classes, each class in seeded order,
// until count rows are taken (or the data runs out).
LabeledDataset StratifiedSample(const LabeledDataset& data, size_t count,
                                uint64_t seed);

// Seeded split into (first, second) with second holding round(fraction * n)
// rows.
std::pair<LabeledDataset, LabeledDataset> HoldoutSplit(const LabeledDataset& data,
                                                       double fraction,
                                                       uint64_t seed);

}  // namespace privfusion::data

#endif  // PRIVFUSION_DATA_DATASET_H_

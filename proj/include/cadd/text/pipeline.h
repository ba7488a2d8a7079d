// Copyright 2026 The CADD Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CADD_TEXT_PIPELINE_H_
#define CADD_TEXT_PIPELINE_H_

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cadd/data/dataset.h"
#include "json.hpp"

namespace cadd::text {

inline constexpr int kPipelineDim = 100;
inline constexpr double kScaleFloor = 1e-8;

// Per-feature z-score followed by PCA to a fixed output width. Components
// beyond the data's rank are zero rows, so the output width never changes.
class FeaturePipeline {
 public:
  FeaturePipeline() = default;
  explicit FeaturePipeline(std::string schema_signature, int out_dim = kPipelineDim);

  // Rows of x are samples. ids (same length as rows) are checked against
  // the guard when one is given.
  void Fit(const Eigen::MatrixXd& x, const std::vector<std::string>& ids = {},
           const data::LeakageGuard* guard = nullptr);

  Eigen::VectorXd Transform(const Eigen::VectorXd& raw) const;
  Eigen::MatrixXd TransformRows(const Eigen::MatrixXd& x) const;
  // Maps a reduced vector back to raw feature space (least-squares inverse).
  Eigen::VectorXd InverseTransform(const Eigen::VectorXd& reduced) const;

  bool fitted() const { return fitted_; }
  int input_width() const { return static_cast<int>(mean_.size()); }
  int out_dim() const { return out_dim_; }
  int active_components() const { return active_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& scale() const { return scale_; }
  const Eigen::MatrixXd& components() const { return components_; }
  const Eigen::VectorXd& explained_variance() const { return explained_variance_; }
  const std::string& schema_signature() const { return schema_signature_; }

  nlohmann::json ToJson() const;
  static FeaturePipeline FromJson(const nlohmann::json& j);
  void Save(const std::filesystem::path& path) const;
  static FeaturePipeline Load(const std::filesystem::path& path);

 private:
  void RequireFitted() const;
  Eigen::VectorXd Standardize(const Eigen::VectorXd& raw) const;

  std::string schema_signature_;
  int out_dim_ = kPipelineDim;
  bool fitted_ = false;
  int active_ = 0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
  Eigen::VectorXd center_;       // mean of standardized training rows
  Eigen::MatrixXd components_;   // out_dim x input_width
  Eigen::VectorXd explained_variance_;
};

}  // namespace cadd::text

#endif  // CADD_TEXT_PIPELINE_H_

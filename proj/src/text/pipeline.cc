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

#include "cadd/text/pipeline.h"

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "cadd/common/error.h"
#include "cadd/common/io.h"

namespace cadd::text {

using nlohmann::json;

FeaturePipeline::FeaturePipeline(std::string schema_signature, int out_dim)
    : schema_signature_(std::move(schema_signature)), out_dim_(out_dim) {
  if (out_dim < 1) throw ValidationError("pipeline output width must be positive");
}

void FeaturePipeline::Fit(const Eigen::MatrixXd& x, const std::vector<std::string>& ids,
                          const data::LeakageGuard* guard) {
  if (x.rows() == 0 || x.cols() == 0) throw ValidationError("cannot fit the feature pipeline on empty data");
  if (!x.allFinite()) throw ValidationError("feature matrix contains non-finite values");
  if (guard != nullptr) {
    if (ids.size() != static_cast<std::size_t>(x.rows())) throw ValidationError("fit ids do not match rows");
    guard->CheckFitIds(ids, "feature pipeline fit");
  }
  const double n = static_cast<double>(x.rows());
  mean_ = x.colwise().mean().transpose();
  const Eigen::MatrixXd centered = x.rowwise() - mean_.transpose();
  scale_ = (centered.colwise().squaredNorm() / n).transpose().cwiseSqrt().cwiseMax(kScaleFloor);
  const Eigen::MatrixXd z = centered.array().rowwise() / scale_.transpose().array();
  center_ = z.colwise().mean().transpose();
  const Eigen::MatrixXd zc = z.rowwise() - center_.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(zc, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double tol = s.size() == 0 ? 0.0
                                   : s[0] * static_cast<double>(std::max(zc.rows(), zc.cols())) *
                                         std::numeric_limits<double>::epsilon() * 16.0;
  active_ = 0;
  while (active_ < out_dim_ && active_ < s.size() && s[active_] > tol) ++active_;

  components_ = Eigen::MatrixXd::Zero(out_dim_, x.cols());
  explained_variance_ = Eigen::VectorXd::Zero(out_dim_);
  for (int k = 0; k < active_; ++k) {
    Eigen::VectorXd v = svd.matrixV().col(k);
    // Pin the sign so the largest-magnitude loading is positive.
    Eigen::Index arg;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    components_.row(k) = v.transpose();
    explained_variance_[k] = s[k] * s[k] / n;
  }
  fitted_ = true;
}

void FeaturePipeline::RequireFitted() const {
  if (!fitted_) throw ValidationError("feature pipeline used before fit");
}

Eigen::VectorXd FeaturePipeline::Standardize(const Eigen::VectorXd& raw) const {
  RequireFitted();
  if (raw.size() != mean_.size()) {
    throw ValidationError("raw vector width " + std::to_string(raw.size()) + " does not match fitted width " +
                          std::to_string(mean_.size()));
  }
  return ((raw - mean_).array() / scale_.array()).matrix() - center_;
}

Eigen::VectorXd FeaturePipeline::Transform(const Eigen::VectorXd& raw) const {
  return components_ * Standardize(raw);
}

Eigen::MatrixXd FeaturePipeline::TransformRows(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), out_dim_);
  for (Eigen::Index r = 0; r < x.rows(); ++r) out.row(r) = Transform(x.row(r).transpose()).transpose();
  return out;
}

Eigen::VectorXd FeaturePipeline::InverseTransform(const Eigen::VectorXd& reduced) const {
  RequireFitted();
  if (reduced.size() != out_dim_) throw ValidationError("reduced vector has the wrong width");
  const Eigen::VectorXd z = components_.transpose() * reduced + center_;
  return (z.array() * scale_.array()).matrix() + mean_;
}

namespace {

json VectorJson(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd VectorFromJson(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

json FeaturePipeline::ToJson() const {
  RequireFitted();
  json rows = json::array();
  for (int k = 0; k < active_; ++k) rows.push_back(VectorJson(components_.row(k).transpose()));
  return json{{"schema", schema_signature_},
              {"out_dim", out_dim_},
              {"input_width", input_width()},
              {"mean", VectorJson(mean_)},
              {"scale", VectorJson(scale_)},
              {"center", VectorJson(center_)},
              {"explained_variance", VectorJson(explained_variance_)},
              {"components", rows}};
}

FeaturePipeline FeaturePipeline::FromJson(const json& j) {
  try {
    FeaturePipeline p(j.at("schema").get<std::string>(), j.at("out_dim").get<int>());
    p.mean_ = VectorFromJson(j.at("mean"));
    p.scale_ = VectorFromJson(j.at("scale"));
    p.center_ = VectorFromJson(j.at("center"));
    p.explained_variance_ = VectorFromJson(j.at("explained_variance"));
    const auto width = p.mean_.size();
    if (p.scale_.size() != width || p.center_.size() != width || p.explained_variance_.size() != p.out_dim_ ||
        j.at("input_width").get<Eigen::Index>() != width) {
      throw ParseError("pipeline vectors have inconsistent widths");
    }
    const auto& rows = j.at("components");
    if (rows.size() > static_cast<std::size_t>(p.out_dim_)) throw ParseError("too many pipeline components");
    p.components_ = Eigen::MatrixXd::Zero(p.out_dim_, width);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const Eigen::VectorXd row = VectorFromJson(rows[k]);
      if (row.size() != width) throw ParseError("pipeline component has the wrong width");
      p.components_.row(static_cast<Eigen::Index>(k)) = row.transpose();
    }
    p.active_ = static_cast<int>(rows.size());
    p.fitted_ = true;
    return p;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed pipeline artifact: ") + e.what());
  }
}

void FeaturePipeline::Save(const std::filesystem::path& path) const { WriteJsonFile(path, ToJson()); }

FeaturePipeline FeaturePipeline::Load(const std::filesystem::path& path) { return FromJson(ReadJsonFile(path)); }

}  // namespace cadd::text

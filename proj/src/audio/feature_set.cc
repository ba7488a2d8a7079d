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

#include "cadd/audio/feature_set.h"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <fstream>

#include "cadd/common/error.h"
#include "cadd/common/hash.h"
#include "cadd/common/io.h"

namespace cadd::audio {

namespace {

constexpr std::uint8_t kAllFamilies = 7;

constexpr FeatureFamily kFamilies[] = {FeatureFamily::kLfcc, FeatureFamily::kMfcc, FeatureFamily::kEnc};

const char* FamilyName(FeatureFamily f) {
  switch (f) {
    case FeatureFamily::kLfcc: return "lfcc";
    case FeatureFamily::kMfcc: return "mfcc";
    case FeatureFamily::kEnc: return "enc";
  }
  return "?";
}

}  // namespace

FeatureSetSpec::FeatureSetSpec(std::uint8_t mask) : mask_(mask) {
  if (mask == 0 || (mask & ~kAllFamilies) != 0) throw ValidationError("feature set must be a non-empty subset");
}

FeatureSetSpec::FeatureSetSpec(std::initializer_list<FeatureFamily> families) : mask_(0) {
  for (auto f : families) mask_ |= static_cast<std::uint8_t>(f);
  if (mask_ == 0) throw ValidationError("feature set must be a non-empty subset");
}

FeatureSetSpec FeatureSetSpec::Parse(std::string_view text) {
  std::uint8_t mask = 0;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    bool found = false;
    for (auto f : kFamilies) {
      if (token == FamilyName(f) || (f == FeatureFamily::kEnc && token == "whisper")) {
        mask |= static_cast<std::uint8_t>(f);
        found = true;
      }
    }
    if (!found) throw ValidationError("unknown feature family: " + token);
    token.clear();
  };
  for (char c : text) {
    if (c == '+' || c == ',' || c == ' ') {
      flush();
    } else {
      token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  flush();
  return FeatureSetSpec(mask);
}

std::string FeatureSetSpec::ToString() const {
  std::string out;
  for (auto f : kFamilies) {
    if (!Has(f)) continue;
    if (!out.empty()) out += '+';
    out += FamilyName(f);
  }
  return out;
}

std::vector<FeatureSetSpec> AllFeatureSubsets() {
  std::vector<FeatureSetSpec> out;
  for (std::uint8_t m = 1; m <= kAllFamilies; ++m) out.emplace_back(m);
  return out;
}

Eigen::MatrixXd FeatureExtractor::Compute(const Waveform& wave, const FeatureSetSpec& spec) const {
  std::vector<Eigen::MatrixXd> parts;
  if (spec.Has(FeatureFamily::kLfcc)) parts.push_back(ExtractCepstral(wave, lfcc));
  if (spec.Has(FeatureFamily::kMfcc)) parts.push_back(ExtractCepstral(wave, mfcc));
  if (spec.Has(FeatureFamily::kEnc)) {
    if (encoder == nullptr) throw EnvironmentError("ENC features requested but no speech encoder is configured");
    parts.push_back(encoder->Encode(wave));
  }
  if (parts.size() == 1) return std::move(parts.front());
  Eigen::Index frames = parts.front().rows();
  Eigen::Index width = 0;
  for (const auto& p : parts) {
    frames = std::min(frames, p.rows());
    width += p.cols();
  }
  Eigen::MatrixXd out(frames, width);
  Eigen::Index col = 0;
  for (const auto& p : parts) {
    out.middleCols(col, p.cols()) = p.topRows(frames);
    col += p.cols();
  }
  return out;
}

int FeatureExtractor::Width(const FeatureSetSpec& spec) const {
  int w = 0;
  if (spec.Has(FeatureFamily::kLfcc)) w += lfcc.n_coeffs;
  if (spec.Has(FeatureFamily::kMfcc)) w += mfcc.n_coeffs;
  if (spec.Has(FeatureFamily::kEnc)) {
    if (encoder == nullptr) throw EnvironmentError("ENC features requested but no speech encoder is configured");
    w += encoder->width();
  }
  return w;
}

std::string FeatureExtractor::Key(const FeatureSetSpec& spec) const {
  std::string key = spec.ToString();
  if (spec.Has(FeatureFamily::kLfcc)) key += "|" + lfcc.Key();
  if (spec.Has(FeatureFamily::kMfcc)) key += "|" + mfcc.Key();
  if (spec.Has(FeatureFamily::kEnc) && encoder != nullptr) {
    key += "|" + encoder->name() + ":" + HexDigest(encoder->ParameterHash());
  }
  return key;
}

FeatureCache::FeatureCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path FeatureCache::Stem(const std::string& sample_id, const std::string& key) const {
  return dir_ / HexDigest(Fnv1a64(sample_id + '\x1f' + key));
}

std::optional<Eigen::MatrixXd> FeatureCache::Get(const std::string& sample_id, const std::string& key) const {
  const auto stem = Stem(sample_id, key);
  const auto sidecar = stem.string() + ".json";
  if (!std::filesystem::exists(sidecar)) return std::nullopt;
  nlohmann::json meta = ReadJsonFile(sidecar);
  if (meta.value("id", "") != sample_id || meta.value("key", "") != key) return std::nullopt;
  const auto rows = meta.at("rows").get<Eigen::Index>();
  const auto cols = meta.at("cols").get<Eigen::Index>();
  std::ifstream in(stem.string() + ".bin", std::ios::binary);
  if (!in) return std::nullopt;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * rows * cols));
  if (in.gcount() != static_cast<std::streamsize>(sizeof(double) * rows * cols)) return std::nullopt;
  return Eigen::MatrixXd(m);
}

void FeatureCache::Put(const std::string& sample_id, const std::string& key, const Eigen::MatrixXd& m) const {
  const auto stem = Stem(sample_id, key);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  WriteFileAtomic(stem.string() + ".bin",
                  std::string_view(reinterpret_cast<const char*>(rm.data()), sizeof(double) * rm.size()));
  WriteJsonFile(stem.string() + ".json", {{"id", sample_id},
                                          {"key", key},
                                          {"rows", m.rows()},
                                          {"cols", m.cols()},
                                          {"key_hash", HexDigest(Fnv1a64(key))}});
}

}  // namespace cadd::audio

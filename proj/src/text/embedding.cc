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

#include "cadd/text/embedding.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "cadd/common/error.h"
#include "cadd/common/hash.h"
#include "cadd/common/io.h"
#include "cadd/common/process.h"
#include "cadd/common/random.h"

namespace cadd::text {

namespace {

constexpr std::int64_t kPadId = 0;
constexpr std::int64_t kVocabulary = std::int64_t{1} << 24;
constexpr int kPadMultiple = 8;
constexpr double kNeighbourMix = 0.25;

}  // namespace

HashEmbedder::HashEmbedder(std::uint64_t seed, int dim, int max_tokens)
    : seed_(seed), dim_(dim), max_tokens_(max_tokens) {
  if (dim < 1 || max_tokens < 1) throw ValidationError("embedder sizes must be positive");
}

std::vector<std::string> HashEmbedder::Words(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

TokenizedText HashEmbedder::Tokenize(std::string_view text) const {
  TokenizedText t;
  for (const auto& w : Words(text)) {
    if (static_cast<int>(t.token_ids.size()) == max_tokens_) break;
    t.token_ids.push_back(1 + static_cast<std::int64_t>(Fnv1a64(w) % (kVocabulary - 1)));
    t.attention_mask.push_back(1);
  }
  while (t.token_ids.size() % kPadMultiple != 0) {
    t.token_ids.push_back(kPadId);
    t.attention_mask.push_back(0);
  }
  return t;
}

Eigen::VectorXd HashEmbedder::TokenVector(std::int64_t token_id) const {
  Rng rng(Mix64(seed_ ^ Mix64(static_cast<std::uint64_t>(token_id))));
  Eigen::VectorXd v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = rng.Normal() / std::sqrt(static_cast<double>(dim_));
  return v;
}

Eigen::MatrixXd HashEmbedder::EmbedTokens(const TokenizedText& tokens) const {
  if (tokens.token_ids.size() != tokens.attention_mask.size()) {
    throw ValidationError("token ids and attention mask differ in length");
  }
  const auto n = static_cast<Eigen::Index>(tokens.size());
  Eigen::MatrixXd h(n, dim_);
  Eigen::VectorXd prev = Eigen::VectorXd::Zero(dim_);
  for (Eigen::Index t = 0; t < n; ++t) {
    const Eigen::VectorXd cur = TokenVector(tokens.token_ids[t]);
    h.row(t) = (cur + kNeighbourMix * prev).transpose();
    prev = cur;
  }
  return h;
}

ExternalCommandEmbedder::ExternalCommandEmbedder(std::string command, int dim)
    : command_(std::move(command)), dim_(dim) {
  if (!FindExecutable(command_)) throw EnvironmentError("embedding command not found: " + command_);
}

TokenizedText ExternalCommandEmbedder::Tokenize(std::string_view text) const {
  ScratchDir scratch;
  const auto in = scratch.path() / "in.txt";
  WriteFileAtomic(in, text);
  std::string out;
  if (RunProcess({command_, "tokenize", in.string()}, &out) != 0) {
    throw EnvironmentError("embedding command failed to tokenize");
  }
  TokenizedText t;
  std::istringstream ss(out);
  std::int64_t id;
  while (ss >> id) {
    t.token_ids.push_back(id);
    t.attention_mask.push_back(1);
  }
  return t;
}

Eigen::MatrixXd ExternalCommandEmbedder::EmbedTokens(const TokenizedText& tokens) const {
  ScratchDir scratch;
  std::string ids;
  for (auto id : tokens.token_ids) ids += std::to_string(id) + "\n";
  const auto in = scratch.path() / "ids.txt";
  const auto out = scratch.path() / "out.csv";
  WriteFileAtomic(in, ids);
  if (RunProcess({command_, "embed", in.string(), out.string()}) != 0) {
    throw EnvironmentError("embedding command failed to embed");
  }
  std::istringstream text(ReadTextFile(out));
  Eigen::MatrixXd h(static_cast<Eigen::Index>(tokens.size()), dim_);
  std::string line;
  Eigen::Index row = 0;
  while (std::getline(text, line)) {
    if (line.empty()) continue;
    if (row >= h.rows()) throw ParseError("embedding command returned too many rows");
    std::istringstream cells(line);
    std::string cell;
    int col = 0;
    while (std::getline(cells, cell, ',')) {
      if (col >= dim_) throw ParseError("embedding row wider than dim");
      h(row, col++) = std::stod(cell);
    }
    if (col != dim_) throw ParseError("embedding row narrower than dim");
    ++row;
  }
  if (row != h.rows()) throw ParseError("embedding command returned too few rows");
  return h;
}

Eigen::VectorXd AttentionMeanPool(const Eigen::MatrixXd& h, std::span<const int> mask, double eps) {
  if (static_cast<std::size_t>(h.rows()) != mask.size()) {
    throw ValidationError("pooling shape mismatch: " + std::to_string(h.rows()) + " rows vs " +
                          std::to_string(mask.size()) + " mask entries");
  }
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(h.cols());
  double weight = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    if (mask[i] == 0) continue;
    acc += mask[i] * h.row(i).transpose();
    weight += mask[i];
  }
  return acc / std::max(weight, eps);
}

Eigen::VectorXd EmbedText(std::string_view text, const EmbeddingProvider& provider) {
  const bool blank = std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
  if (blank) return Eigen::VectorXd::Zero(provider.dim());
  const TokenizedText tokens = provider.Tokenize(text);
  const Eigen::MatrixXd h = provider.EmbedTokens(tokens);
  if (h.rows() != static_cast<Eigen::Index>(tokens.size()) || h.cols() != provider.dim()) {
    throw ValidationError("embedding provider returned a matrix of the wrong shape");
  }
  return AttentionMeanPool(h, tokens.attention_mask);
}

}  // namespace cadd::text

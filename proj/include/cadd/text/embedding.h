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

#ifndef CADD_TEXT_EMBEDDING_H_
#define CADD_TEXT_EMBEDDING_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cadd::text {

inline constexpr int kEmbeddingDim = 100;
inline constexpr double kPoolEpsilon = 1e-9;

struct TokenizedText {
  std::vector<std::int64_t> token_ids;
  // 1 for real tokens, 0 for padding.
  std::vector<int> attention_mask;

  std::size_t size() const { return token_ids.size(); }
};

// Frozen text encoder: tokenization plus contextual token embeddings.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual int dim() const = 0;
  virtual TokenizedText Tokenize(std::string_view text) const = 0;
  // T x dim matrix, one row per token (padding rows included).
  virtual Eigen::MatrixXd EmbedTokens(const TokenizedText& tokens) const = 0;
};

// Lowercased alphanumeric word tokens hashed into a seeded Gaussian table;
// each token embedding is mixed with its left neighbour so the output is
// context dependent. Sequences are padded to a multiple of 8 tokens.
class HashEmbedder : public EmbeddingProvider {
 public:
  explicit HashEmbedder(std::uint64_t seed = 0, int dim = kEmbeddingDim, int max_tokens = 512);

  int dim() const override { return dim_; }
  TokenizedText Tokenize(std::string_view text) const override;
  Eigen::MatrixXd EmbedTokens(const TokenizedText& tokens) const override;

  Eigen::VectorXd TokenVector(std::int64_t token_id) const;
  static std::vector<std::string> Words(std::string_view text);

 private:
  std::uint64_t seed_;
  int dim_;
  int max_tokens_;
};

// Delegates to an external tool with two modes:
//   `command tokenize <in.txt>` prints whitespace-separated token ids, and
//   `command embed <ids.txt> <out.csv>` writes one comma-separated row per id.
// Every returned token is treated as a real (unmasked) token.
class ExternalCommandEmbedder : public EmbeddingProvider {
 public:
  ExternalCommandEmbedder(std::string command, int dim);

  int dim() const override { return dim_; }
  TokenizedText Tokenize(std::string_view text) const override;
  Eigen::MatrixXd EmbedTokens(const TokenizedText& tokens) const override;

 private:
  std::string command_;
  int dim_;
};

// e = sum_i m_i h_i / max(sum_i m_i, eps). Masked rows are never read.
Eigen::VectorXd AttentionMeanPool(const Eigen::MatrixXd& h, std::span<const int> mask,
                                  double eps = kPoolEpsilon);

// Tokenize, embed and pool; blank text gives the zero vector.
Eigen::VectorXd EmbedText(std::string_view text, const EmbeddingProvider& provider);

}  // namespace cadd::text

#endif  // CADD_TEXT_EMBEDDING_H_

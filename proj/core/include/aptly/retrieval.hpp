#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aptly/diagnostic.hpp"
#include "aptly/registry.hpp"

namespace aptly {

struct Vector {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
  friend bool operator==(const Vector&, const Vector&) = default;
};

struct ExamplePair {
  std::string id;
  std::string description;
  std::string code;
  std::optional<Vector> embedding;

  friend bool operator==(const ExamplePair&, const ExamplePair&) = default;
};

struct Corpus {
  std::vector<ExamplePair> pairs;
  std::size_t dimension = 0;  // 0 until some pair carries an embedding

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct Scored {
  const ExamplePair* pair;
  double distance;
};

inline constexpr std::size_t kDefaultDimension = 256;
inline constexpr std::size_t kDefaultK = 3;

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Hashed bag of words: lowercase ASCII, split on non-alphanumeric runs,
/// bucket = fnv1a64(token) mod d, then L2-normalized. Bytes >= 0x80 count
/// as word characters so UTF-8 words stay whole.
Vector mock_embed(std::string_view text, std::size_t d);

/// 1 - cos(u, v); 1.0 when either vector is zero.
Outcome<double> cosine_distance(const Vector& u, const Vector& v);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual Vector embed(std::string_view text) const = 0;
};

class MockEmbedder final : public Embedder {
 public:
  explicit MockEmbedder(std::size_t d = kDefaultDimension) : d_(d) {}
  std::size_t dimension() const override { return d_; }
  Vector embed(std::string_view text) const override { return mock_embed(text, d_); }

 private:
  std::size_t d_;
};

/// The min(k, |corpus|) nearest pairs by description embedding, ascending by
/// distance, ties broken by id.
Outcome<std::vector<Scored>> top_k(std::string_view query, const Corpus& corpus, std::size_t k,
                                   const Embedder& embedder);

/// JSON Lines, one {id, description, code, embedding?} object per line.
/// Every pair's code must parse and validate against `registry`.
Outcome<Corpus> parse_corpus(std::string_view text, const Registry& registry);
Outcome<Corpus> corpus_load(const std::filesystem::path& file, const Registry& registry);
std::string corpus_to_jsonl(const Corpus& corpus);
Outcome<bool> corpus_save(const Corpus& corpus, const std::filesystem::path& file);

/// Embeds every pair that lacks an embedding of the embedder's dimension.
Corpus corpus_build(Corpus corpus, const Embedder& embedder);

}  // namespace aptly

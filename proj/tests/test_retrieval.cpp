#include <cmath>
#include <cstring>
#include <filesystem>

#include "aptly/retrieval.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aptly;
using namespace aptly::testing;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(d);
  for (auto& x : v) x = n(rng);
  return v;
}

double norm(const Vector& v) {
  double s = 0;
  for (double x : v.values) s += x * x;
  return std::sqrt(s);
}

Corpus embedded(Corpus c, std::size_t d) { return corpus_build(std::move(c), MockEmbedder(d)); }

std::vector<std::string> ids(const std::vector<Scored>& scored) {
  std::vector<std::string> out;
  for (const auto& s : scored) out.push_back(s.pair->id);
  return out;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() / ("aptly-test-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("fnv1a64 published vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(reference_fnv1a("foobar") == 0x85944171f73967e8ULL);
  for (const char* s : {"button", "planet", "x", "\xc3\xbc"}) CHECK(fnv1a64(s) == reference_fnv1a(s));
}

TEST_CASE("mock_embed") {
  const auto zero = mock_embed("", 256);
  REQUIRE(zero.dimension() == 256);
  for (double x : zero.values) CHECK(x == 0.0);

  const auto v = mock_embed("button button", 256);
  const std::size_t idx = reference_fnv1a("button") % 256;
  for (std::size_t i = 0; i < 256; ++i) CHECK(v.values[i] == (i == idx ? 1.0 : 0.0));

  const auto a = mock_embed("Draw on a Canvas, then clear it!", 256);
  const auto b = mock_embed("Draw on a Canvas, then clear it!", 256);
  CHECK(std::memcmp(a.values.data(), b.values.data(), 256 * sizeof(double)) == 0);
  CHECK(mock_embed("BUTTON", 256) == mock_embed("button", 256));
  CHECK(norm(a) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cosine distance basics") {
  std::mt19937_64 rng(7);
  const Vector v{random_vector(rng, 64)};
  CHECK(std::abs(*cosine_distance(v, v)) < 1e-12);

  Vector e0{std::vector<double>(8, 0.0)}, e1{std::vector<double>(8, 0.0)};
  e0.values[0] = 1;
  e1.values[1] = 1;
  CHECK(*cosine_distance(e0, e1) == 1.0);

  Vector z{std::vector<double>(8, 0.0)};
  CHECK(*cosine_distance(z, e0) == 1.0);

  auto mismatch = cosine_distance(e0, Vector{std::vector<double>(9, 0.0)});
  REQUIRE(!mismatch);
  CHECK(mismatch.error().front().code == DiagCode::DimMismatch);
}

TEST_CASE("cosine distance against the naive oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dim(1, 300);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t d = dim(rng);
    const auto u = random_vector(rng, d), v = random_vector(rng, d);
    const double got = *cosine_distance(Vector{u}, Vector{v});
    CHECK(std::abs(got - naive_cosine_distance(u, v)) <= 1e-9);
    CHECK(*cosine_distance(Vector{u}, Vector{v}) == *cosine_distance(Vector{v}, Vector{u}));

    auto su = u;
    const double s = scale(rng);
    for (auto& x : su) x *= s;
    CHECK(std::abs(*cosine_distance(Vector{su}, Vector{v}) - got) <= 1e-9);
  }
}

TEST_CASE("top_k against brute force") {
  const auto corpus = embedded(synthetic_corpus(200, 99), 256);
  const MockEmbedder emb(256);
  for (const char* q : {"button", "draw canvas", "planet weight", "", "speak text timer", "unrelated"}) {
    for (std::size_t k : {0u, 1u, 3u, 10u, 500u}) {
      auto got = top_k(q, corpus, k, emb);
      REQUIRE(got);
      CHECK_MESSAGE(ids(*got) == brute_force_top_k(emb.embed(q).values, corpus, k), q << " k=" << k);
    }
  }
}

TEST_CASE("top_k edges") {
  const MockEmbedder emb(256);
  const auto one = embedded(synthetic_corpus(1, 5), 256);
  auto got = top_k("anything at all", one, 3, emb);
  REQUIRE(got);
  REQUIRE(got->size() == 1);
  CHECK(got->front().pair == &one.pairs[0]);

  auto none = top_k("x", one, 0, emb);
  REQUIRE(none);
  CHECK(none->empty());

  auto bare = synthetic_corpus(3, 1);
  auto missing = top_k("x", bare, 1, emb);
  REQUIRE(!missing);
  CHECK(missing.error().front().code == DiagCode::MissingEmbedding);

  auto wrong_dim = top_k("x", embedded(synthetic_corpus(3, 1), 16), 1, emb);
  REQUIRE(!wrong_dim);
  CHECK(wrong_dim.error().front().code == DiagCode::DimMismatch);
}

TEST_CASE("corpus build") {
  const auto corpus = embedded(synthetic_corpus(10, 3), 256);
  CHECK(corpus.dimension == 256);
  for (const auto& p : corpus.pairs) {
    REQUIRE(p.embedding);
    CHECK(p.embedding->dimension() == 256);
    const double n = norm(*p.embedding);
    CHECK((n == 0.0 || std::abs(n - 1.0) < 1e-12));
  }
  // re-embeds at a new dimension, keeps matching ones
  const auto rebuilt = embedded(corpus, 32);
  for (const auto& p : rebuilt.pairs) CHECK(p.embedding->dimension() == 32);
  CHECK(embedded(corpus, 256) == corpus);
}

TEST_CASE("corpus save and load") {
  TempDir dir;
  const auto corpus = embedded(synthetic_corpus(12, 8), 256);
  const auto file = dir.path / "corpus.jsonl";
  REQUIRE(corpus_save(corpus, file));
  auto back = corpus_load(file, seed_registry());
  REQUIRE(back);
  CHECK(*back == corpus);
  for (std::size_t i = 0; i < corpus.pairs.size(); ++i) {
    CHECK(std::memcmp(back->pairs[i].embedding->values.data(), corpus.pairs[i].embedding->values.data(),
                      256 * sizeof(double)) == 0);
  }
  CHECK(corpus_to_jsonl(*back) == corpus_to_jsonl(corpus));
}

TEST_CASE("corpus errors") {
  const auto& reg = seed_registry();
  const std::string ok = R"j({"id": "a", "description": "x", "code": "Screen1 = Screen()\n"})j";

  auto dup = parse_corpus(ok + "\n" + ok + "\n", reg);
  REQUIRE(!dup);
  CHECK(dup.error().front().code == DiagCode::CorpusDupId);
  CHECK(dup.error().front().span.line == 2);

  auto bad_code = parse_corpus(R"j({"id": "a", "description": "x", "code": "W = Widget()"})j", reg);
  REQUIRE(!bad_code);
  CHECK(bad_code.error().front().code == DiagCode::CorpusCodeInvalid);

  auto invalid = parse_corpus(R"j({"id": "a", "description": "x", "code": "Screen1 = Screen()\nW = Widget(Screen1)"})j",
                              reg);
  REQUIRE(!invalid);
  CHECK(invalid.error().front().code == DiagCode::CorpusCodeInvalid);

  for (const char* bad : {"{", "[]", R"j({"id": "a", "description": "x"})j",
                          R"j({"id": "a", "description": "x", "code": "Screen1 = Screen()", "extra": 1})j",
                          R"j({"id": "a", "description": "x", "code": "Screen1 = Screen()", "embedding": []})j",
                          R"j({"id": "a", "description": "x", "code": "Screen1 = Screen()", "embedding": ["1"]})j"}) {
    auto r = parse_corpus(bad, reg);
    REQUIRE_MESSAGE(!r, bad);
    CHECK_MESSAGE(r.error().front().code == DiagCode::CorpusParse, bad);
  }

  auto dims = parse_corpus(
      R"j({"id": "a", "description": "x", "code": "Screen1 = Screen()", "embedding": [1, 0]})j"
      "\n"
      R"j({"id": "b", "description": "y", "code": "Screen1 = Screen()", "embedding": [1, 0, 0]})j",
      reg);
  REQUIRE(!dims);
  CHECK(dims.error().front().code == DiagCode::CorpusParse);

  auto blank_lines = parse_corpus("\n" + ok + "\n\n", reg);
  REQUIRE(blank_lines);
  CHECK(blank_lines->pairs.size() == 1);

  auto fixture = corpus_load(fixture_path("corpus.jsonl"), reg);
  REQUIRE(fixture);
  CHECK(fixture->pairs.size() == 6);
}

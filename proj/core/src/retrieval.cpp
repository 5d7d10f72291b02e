#include "aptly/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "aptly/io.hpp"
#include "aptly/parser.hpp"
#include "json.hpp"

namespace aptly {

using nlohmann::json;

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

char lower(unsigned char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c); }

}  // namespace

Vector mock_embed(std::string_view text, std::size_t d) {
  Vector v{std::vector<double>(d, 0.0)};
  if (d == 0) return v;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    v.values[fnv1a64(token) % d] += 1.0;
    token.clear();
  };
  for (unsigned char c : text) {
    if (is_word_byte(c)) {
      token += lower(c);
    } else {
      flush();
    }
  }
  flush();
  double norm = 0.0;
  for (double x : v.values) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v.values) x /= norm;
  }
  return v;
}

Outcome<double> cosine_distance(const Vector& u, const Vector& v) {
  if (u.dimension() != v.dimension()) {
    return fail(DiagCode::DimMismatch, "vector dimensions differ: " + std::to_string(u.dimension()) + " vs " +
                                           std::to_string(v.dimension()));
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    dot += u.values[i] * v.values[i];
    uu += u.values[i] * u.values[i];
    vv += v.values[i] * v.values[i];
  }
  if (uu == 0.0 || vv == 0.0) return 1.0;
  const double cos = std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
  return 1.0 - cos;
}

Outcome<std::vector<Scored>> top_k(std::string_view query, const Corpus& corpus, std::size_t k,
                                   const Embedder& embedder) {
  std::vector<Scored> scored;
  if (k == 0) return scored;
  for (const auto& pair : corpus.pairs) {
    if (!pair.embedding) return fail(DiagCode::MissingEmbedding, "pair '" + pair.id + "' has no embedding");
  }
  const Vector q = embedder.embed(query);
  scored.reserve(corpus.pairs.size());
  for (const auto& pair : corpus.pairs) {
    auto d = cosine_distance(q, *pair.embedding);
    if (!d) return fail(std::move(d).error());
    scored.push_back(Scored{&pair, *d});
  }
  auto less = [](const Scored& a, const Scored& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.pair->id < b.pair->id;
  };
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(), less);
  scored.resize(n);
  return scored;
}

// ---------------------------------------------------------------------------
// Corpus files
// ---------------------------------------------------------------------------

namespace {

Diagnostic corpus_diag(DiagCode code, std::size_t line, std::string message) {
  return make_diag(code, "corpus line " + std::to_string(line) + ": " + message,
                   SourceSpan{static_cast<std::uint32_t>(line), 1, 0});
}

std::optional<ExamplePair> parse_record(const json& rec, std::size_t line, Diagnostics& diags) {
  auto bad = [&](std::string msg) {
    diags.push_back(corpus_diag(DiagCode::CorpusParse, line, std::move(msg)));
    return std::nullopt;
  };
  if (!rec.is_object()) return bad("expected a JSON object");
  for (const auto& [key, _] : rec.items()) {
    if (key != "id" && key != "description" && key != "code" && key != "embedding") {
      return bad("unknown key '" + key + "'");
    }
  }
  ExamplePair pair;
  for (const char* key : {"id", "description", "code"}) {
    auto it = rec.find(key);
    if (it == rec.end() || !it->is_string()) return bad(std::string("'") + key + "' must be a string");
  }
  pair.id = rec.at("id").get<std::string>();
  pair.description = rec.at("description").get<std::string>();
  pair.code = rec.at("code").get<std::string>();
  if (pair.id.empty()) return bad("'id' must not be empty");
  if (auto it = rec.find("embedding"); it != rec.end()) {
    if (!it->is_array()) return bad("'embedding' must be an array of numbers");
    Vector v;
    for (const auto& x : *it) {
      if (!x.is_number()) return bad("'embedding' must be an array of numbers");
      const double value = x.get<double>();
      if (!std::isfinite(value)) return bad("'embedding' entries must be finite");
      v.values.push_back(value);
    }
    if (v.values.empty()) return bad("'embedding' must not be empty");
    pair.embedding = std::move(v);
  }
  return pair;
}

}  // namespace

Outcome<Corpus> parse_corpus(std::string_view text, const Registry& registry) {
  Corpus corpus;
  Diagnostics diags;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (end == text.size()) break;
      continue;
    }
    json rec = json::parse(line.begin(), line.end(), nullptr, false);
    if (rec.is_discarded()) {
      diags.push_back(corpus_diag(DiagCode::CorpusParse, line_no, "invalid JSON"));
      continue;
    }
    auto pair = parse_record(rec, line_no, diags);
    if (!pair) continue;
    if (!ids.insert(pair->id).second) {
      diags.push_back(corpus_diag(DiagCode::CorpusDupId, line_no, "duplicate id '" + pair->id + "'"));
      continue;
    }
    if (pair->embedding) {
      if (corpus.dimension == 0) corpus.dimension = pair->embedding->dimension();
      if (pair->embedding->dimension() != corpus.dimension) {
        diags.push_back(corpus_diag(DiagCode::CorpusParse, line_no,
                                    "embedding has dimension " + std::to_string(pair->embedding->dimension()) +
                                        ", expected " + std::to_string(corpus.dimension)));
        continue;
      }
    }
    auto program = parse(pair->code);
    Diagnostics problems = program ? validate(*program, registry) : program.error();
    if (!problems.empty()) {
      diags.push_back(corpus_diag(DiagCode::CorpusCodeInvalid, line_no,
                                  "code of '" + pair->id + "' is invalid: " + format_diagnostic(problems.front())));
      continue;
    }
    corpus.pairs.push_back(std::move(*pair));
  }
  if (!diags.empty()) return fail(std::move(diags));
  return corpus;
}

Outcome<Corpus> corpus_load(const std::filesystem::path& file, const Registry& registry) {
  auto text = read_text_file(file);
  if (!text) return fail(std::move(text).error());
  return parse_corpus(*text, registry);
}

std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& pair : corpus.pairs) {
    json rec = {{"id", pair.id}, {"description", pair.description}, {"code", pair.code}};
    if (pair.embedding) rec["embedding"] = pair.embedding->values;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

Outcome<bool> corpus_save(const Corpus& corpus, const std::filesystem::path& file) {
  return write_text_file(file, corpus_to_jsonl(corpus));
}

Corpus corpus_build(Corpus corpus, const Embedder& embedder) {
  const std::size_t d = embedder.dimension();
  for (auto& pair : corpus.pairs) {
    if (!pair.embedding || pair.embedding->dimension() != d) pair.embedding = embedder.embed(pair.description);
  }
  corpus.dimension = d;
  return corpus;
}

}  // namespace aptly

#include "aptly/blocks.hpp"
#include "aptly/parser.hpp"
#include "aptly/pipeline.hpp"
#include "aptly/printer.hpp"
#include "aptly/prompt.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aptly;
using namespace aptly::testing;

namespace {

const Corpus& fixture_corpus() {
  static const Corpus corpus = [] {
    auto c = corpus_load(fixture_path("corpus.jsonl"), seed_registry());
    if (!c) throw std::runtime_error("fixture corpus");
    return corpus_build(std::move(*c), MockEmbedder{});
  }();
  return corpus;
}

std::unique_ptr<ScriptedBackend> script(const char* fixture) {
  auto b = ScriptedBackend::from_json(read_file(fixture_path(fixture)));
  REQUIRE(b);
  return std::move(*b);
}

const std::string kListingDescription = "An app to calculate weights on different planets";

}  // namespace

TEST_CASE("nearest echo reproduces the stored pair") {
  MockEmbedder emb;
  NearestEchoBackend backend;
  GenerationContext ctx{seed_registry(), fixture_corpus(), emb, backend};
  auto r = generate(kListingDescription, ctx);
  REQUIRE(r);
  CHECK(r->attempts == 1);
  REQUIRE(!r->examples_used.empty());
  CHECK(r->examples_used.front() == "planet-weight");
  CHECK(r->canonical_code == read_file(golden_path("listing1_canonical.aptly")));

  auto p = parse(r->code);
  REQUIRE(p);
  CHECK(validate(*p, seed_registry()).empty());
  CHECK(compile(*p, seed_registry()).has_value());
  CHECK(r->prompt.ends_with("### Description:\n" + kListingDescription + "\n### Aptly:\n"));
}

TEST_CASE("garbage exhausts the repair budget") {
  MockEmbedder emb;
  auto backend = script("garbage_script.json");
  GenerationContext ctx{seed_registry(), fixture_corpus(), emb, *backend};
  auto r = generate("a counter", ctx);
  REQUIRE(!r);
  CHECK(r.error().attempts == 3);
  CHECK(r.error().diagnostics.front().code == DiagCode::UnparseableOutput);
  CHECK(r.error().raw_completions ==
        std::vector<std::string>{"this is not aptly", "```\nstill( not\n```", "Screen1 = Widget()"});

  // each repair prompt carries the previous rejection
  const auto prompts = backend->prompts_seen();
  REQUIRE(prompts.size() == 3);
  CHECK(prompts[0] == r.error().prompt);
  CHECK(prompts[1].starts_with(prompts[0] + "this is not aptly\n### Diagnostics:\n"));
  CHECK(prompts[2].find("still( not") != std::string::npos);
}

TEST_CASE("repair succeeds on a later attempt") {
  MockEmbedder emb;
  ScriptedBackend backend({{"nope"}, {"Screen1 = Screen()\n"}});
  GenerationContext ctx{seed_registry(), fixture_corpus(), emb, backend};
  auto r = generate("anything", ctx);
  REQUIRE(r);
  CHECK(r->attempts == 2);
  CHECK(r->raw_completions.size() == 2);
}

TEST_CASE("max_repairs bounds attempts") {
  MockEmbedder emb;
  auto backend = script("garbage_script.json");
  GenerationContext ctx{seed_registry(), fixture_corpus(), emb, *backend};
  GenerationOptions opts;
  opts.max_repairs = 0;
  auto r = generate("a counter", ctx, opts);
  REQUIRE(!r);
  CHECK(r.error().attempts == 1);
  CHECK(backend->remaining() == 2);
}

TEST_CASE("k larger than the corpus") {
  MockEmbedder emb;
  NearestEchoBackend backend;
  GenerationContext ctx{seed_registry(), fixture_corpus(), emb, backend};
  GenerationOptions opts;
  opts.k = 50;
  auto r = generate("make the phone vibrate", ctx, opts);
  REQUIRE(r);
  CHECK(r->examples_used.size() == fixture_corpus().pairs.size());
}

TEST_CASE("empty description") {
  MockEmbedder emb;
  ScriptedBackend backend({});
  GenerationContext ctx{seed_registry(), fixture_corpus(), emb, backend};
  auto r = generate("  \n", ctx);
  REQUIRE(!r);
  CHECK(r.error().diagnostics.front().code == DiagCode::BadRequest);
  CHECK(backend.prompts_seen().empty());
}

TEST_CASE("edit applies the scripted change") {
  MockEmbedder emb;
  auto backend = script("edit_script.json");
  GenerationContext ctx{seed_registry(), fixture_corpus(), emb, *backend};
  auto r = edit(listing1_source(), "Rename the button to Compute", ctx);
  REQUIRE(r);
  CHECK(r->code.find("Text = \"Compute\"") != std::string::npos);
  CHECK(r->code.find("Calculate'") == std::string::npos);
  auto p = parse(r->code);
  REQUIRE(p);
  CHECK(validate(*p, seed_registry()).empty());
  CHECK(backend->prompts_seen().front().find("### Edit:\nRename the button to Compute\n") != std::string::npos);
}

TEST_CASE("edit rejects invalid current code before calling the backend") {
  MockEmbedder emb;
  ScriptedBackend backend({{"Screen1 = Screen()"}});
  GenerationContext ctx{seed_registry(), fixture_corpus(), emb, backend};
  for (const char* bad : {"Screen1 = Screen(", "Screen1 = Screen()\nW = Widget(Screen1)\n"}) {
    auto r = edit(bad, "Make the button bigger", ctx);
    REQUIRE(!r);
    CHECK(r.error().diagnostics.front().code == DiagCode::CurrentCodeInvalid);
    CHECK(r.error().diagnostics.size() >= 2);
  }
  CHECK(backend.prompts_seen().empty());
  CHECK(backend.remaining() == 1);
}

TEST_CASE("edit with an empty instruction") {
  MockEmbedder emb;
  NearestEchoBackend backend;
  GenerationContext ctx{seed_registry(), fixture_corpus(), emb, backend};
  auto r = edit(listing1_source(), "", ctx);
  REQUIRE(!r);
  CHECK(r.error().diagnostics.front().code == DiagCode::BadRequest);
}

TEST_CASE("backend timeout leaves the code alone") {
  MockEmbedder emb;
  auto backend = script("timeout_script.json");
  GenerationContext ctx{seed_registry(), fixture_corpus(), emb, *backend};
  const std::string current = listing1_source();
  const std::string before = current;
  auto r = edit(current, "Make the button bigger", ctx);
  REQUIRE(!r);
  CHECK(r.error().diagnostics.front().code == DiagCode::Backend);
  CHECK(r.error().diagnostics.front().message.find("timed out") != std::string::npos);
  CHECK(r.error().attempts == 0);
  CHECK(current == before);
}

TEST_CASE("exhausted script is a backend error") {
  MockEmbedder emb;
  ScriptedBackend backend({{"nope"}});
  GenerationContext ctx{seed_registry(), fixture_corpus(), emb, backend};
  auto r = generate("x", ctx);
  REQUIRE(!r);
  CHECK(r.error().diagnostics.front().code == DiagCode::Backend);
  CHECK(r.error().raw_completions == std::vector<std::string>{"nope"});
}

TEST_CASE("cancellation") {
  MockEmbedder emb;
  NearestEchoBackend backend;
  GenerationContext ctx{seed_registry(), fixture_corpus(), emb, backend};
  std::stop_source stop;
  stop.request_stop();
  GenerationOptions opts;
  opts.cancel = stop.get_token();
  auto r = generate(kListingDescription, ctx, opts);
  REQUIRE(!r);
  CHECK(r.error().diagnostics.front().code == DiagCode::Backend);
}

TEST_CASE("nearest echo on an edit prompt without examples echoes the current code") {
  NearestEchoBackend backend;
  CompletionRequest req;
  req.prompt = std::string(kEditHeader) + "### Current Aptly:\nScreen1 = Screen()\n### Edit:\nx\n### Aptly:\n";
  auto r = backend.complete(req);
  REQUIRE(r);
  CHECK(*r == "Screen1 = Screen()");
}

TEST_CASE("remote backend wire format") {
  CompletionRequest req;
  req.prompt = "P";
  req.model = "m";
  req.stop = {"### Description:"};
  const auto body = RemoteBackend::request_body(req);
  CHECK(body.find("\"prompt\":\"P\"") != std::string::npos);
  CHECK(body.find("\"model\":\"m\"") != std::string::npos);
  CHECK(body.find("\"stop\":[\"### Description:\"]") != std::string::npos);

  auto ok = RemoteBackend::parse_response(R"j({"choices": [{"text": "Screen1 = Screen()"}]})j");
  REQUIRE(ok);
  CHECK(*ok == "Screen1 = Screen()");
  for (const char* bad : {"", "{}", R"j({"choices": []})j", R"j({"choices": [{"text": 3}]})j"}) {
    auto r = RemoteBackend::parse_response(bad);
    REQUIRE(!r);
    CHECK(r.error().front().code == DiagCode::Backend);
  }

  RemoteBackend unset("http://127.0.0.1:1/v1/completions", "APTLY_TEST_KEY_THAT_IS_NOT_SET");
  auto r = unset.complete(req);
  REQUIRE(!r);
  CHECK(r.error().front().code == DiagCode::Backend);
}

#include <fstream>

#include "aptly/config.hpp"
#include "aptly/io.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aptly;
using namespace aptly::testing;

namespace {

DiagCode config_error(std::string_view text) {
  auto c = parse_config(text, "/base");
  REQUIRE_MESSAGE(!c, text);
  return c.error().front().code;
}

}  // namespace

TEST_CASE("defaults and relative paths") {
  auto c = parse_config(R"j({"corpus": "data/corpus.jsonl"})j", "/srv/aptly");
  REQUIRE(c);
  CHECK(c->corpus == std::filesystem::path("/srv/aptly/data/corpus.jsonl"));
  CHECK(c->registry.empty());
  CHECK(c->listen_port == 8080);
  CHECK(c->backend.kind == "mock-echo");
  CHECK(c->default_k == 3);
  CHECK(c->max_concurrent_generations == 4);
  CHECK(c->embedding_dimension == 256);

  auto abs = parse_config(R"j({"corpus": "/abs/c.jsonl", "registry": "r.json"})j", "/srv");
  REQUIRE(abs);
  CHECK(abs->corpus == std::filesystem::path("/abs/c.jsonl"));
  CHECK(abs->registry == std::filesystem::path("/srv/r.json"));
}

TEST_CASE("full config") {
  auto c = parse_config(R"j({
    "listen_host": "0.0.0.0", "listen_port": 9000, "corpus": "c.jsonl",
    "backend": {"kind": "remote", "url": "https://example.invalid/v1/completions", "api_key_env": "LLM_KEY"},
    "default_k": 5, "default_model": "big", "request_timeout_seconds": 10,
    "max_concurrent_generations": 2, "embedding_dimension": 64})j",
                        "/x");
  REQUIRE(c);
  CHECK(c->listen_host == "0.0.0.0");
  CHECK(c->listen_port == 9000);
  CHECK(c->backend.kind == "remote");
  CHECK(c->backend.api_key_env == "LLM_KEY");
  CHECK(c->default_model == "big");
  CHECK(c->request_timeout_seconds == 10);
  CHECK(c->max_concurrent_generations == 2);
  CHECK(c->embedding_dimension == 64);
}

TEST_CASE("config errors") {
  CHECK(config_error("") == DiagCode::Config);
  CHECK(config_error("[]") == DiagCode::Config);
  CHECK(config_error("{}") == DiagCode::Config);
  CHECK(config_error(R"j({"corpus": "c", "port": 1})j") == DiagCode::Config);
  CHECK(config_error(R"j({"corpus": "c", "listen_port": 70000})j") == DiagCode::Config);
  CHECK(config_error(R"j({"corpus": "c", "listen_port": "80"})j") == DiagCode::Config);
  CHECK(config_error(R"j({"corpus": "c", "backend": {"kind": "magic"}})j") == DiagCode::Config);
  CHECK(config_error(R"j({"corpus": "c", "backend": {"kind": "remote", "url": "http://x"}})j") == DiagCode::Config);
  CHECK(config_error(R"j({"corpus": "c", "backend": {"kind": "remote", "api_key_env": "K"}})j") == DiagCode::Config);
  CHECK(config_error(R"j({"corpus": "c", "backend": {"kind": "scripted"}})j") == DiagCode::Config);
  CHECK(config_error(R"j({"corpus": "c", "max_concurrent_generations": 0})j") == DiagCode::Config);
}

TEST_CASE("keys never come from the file") {
  CHECK(config_error(R"j({"corpus": "c", "backend": {"kind": "remote", "url": "http://x", "api_key_env": "K",
                         "api_key": "sk-secret"}})j") == DiagCode::Config);
  CHECK(config_error(R"j({"corpus": "c", "api_key": "sk-secret"})j") == DiagCode::Config);
}

TEST_CASE("load_config checks paths") {
  const auto dir = std::filesystem::temp_directory_path() / ("aptly-cfg-" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  const auto file = dir / "config.json";
  {
    std::ofstream(file) << R"j({"corpus": "missing.jsonl"})j";
  }
  auto missing = load_config(file);
  REQUIRE(!missing);
  CHECK(missing.error().front().code == DiagCode::Config);

  std::filesystem::copy_file(fixture_path("corpus.jsonl"), dir / "corpus.jsonl");
  {
    std::ofstream(file) << R"j({"corpus": "corpus.jsonl"})j";
  }
  auto ok = load_config(file);
  REQUIRE(ok);
  CHECK(ok->corpus == dir / "corpus.jsonl");
  CHECK(ok->registry == seed_registry_path());

  CHECK_FALSE(load_config(dir / "nope.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("make_backend") {
  BackendConfig echo;
  auto e = make_backend(echo);
  REQUIRE(e);
  CHECK((*e)->identify() == "mock-echo");

  BackendConfig scripted{"scripted", "", "", fixture_path("garbage_script.json")};
  auto s = make_backend(scripted);
  REQUIRE(s);
  CHECK((*s)->identify() == "scripted");

  BackendConfig broken{"scripted", "", "", fixture_path("listing1.aptly")};
  CHECK_FALSE(make_backend(broken));

  BackendConfig remote{"remote", "http://127.0.0.1:9/v1/completions", "SOME_KEY", {}};
  auto r = make_backend(remote);
  REQUIRE(r);
  CHECK((*r)->identify() == "remote");
}

TEST_CASE("seed registry path is installed with the library") {
  CHECK(std::filesystem::exists(seed_registry_path()));
}

TEST_CASE("write_text_file replaces regular files only") {
  const auto dir = std::filesystem::temp_directory_path() / "aptly_io_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir / "sub");
  const auto file = dir / "out.txt";
  REQUIRE(write_text_file(file, "one"));
  REQUIRE(write_text_file(file, "two"));
  CHECK(*read_text_file(file) == "two");
  CHECK(!std::filesystem::exists(dir / "out.txt.tmp"));

  auto onto_dir = write_text_file(dir / "sub", "x");
  REQUIRE(!onto_dir);
  CHECK(onto_dir.error().front().code == DiagCode::Io);
  CHECK(std::filesystem::is_directory(dir / "sub"));
  std::filesystem::remove_all(dir);
}

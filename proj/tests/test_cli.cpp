#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

using namespace aptly::testing;
using nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

struct Scratch {
  std::filesystem::path dir;
  Scratch() {
    dir = std::filesystem::temp_directory_path() / ("aptly-cli-" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(dir);
  }
  ~Scratch() { std::filesystem::remove_all(dir); }
  std::filesystem::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name, std::ios::binary) << text;
    return dir / name;
  }
};

Run run(const std::vector<std::string>& args) {
  static const Scratch scratch;
  const auto err_file = scratch.dir / "stderr.txt";
  std::string cmd = quote(APTLY_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>" + quote(err_file.string()) + " </dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = read_file(err_file);
  return r;
}

const std::string kListingDescription = "An app to calculate weights on different planets";

}  // namespace

TEST_CASE("cli parse") {
  auto ok = run({"parse", fixture_path("listing1.aptly").string()});
  CHECK(ok.status == 0);
  CHECK(json::parse(ok.out).at("components").size() == 8);

  Scratch s;
  auto empty = run({"parse", s.write("empty.aptly", "").string()});
  CHECK(empty.status == 1);
  CHECK(empty.err.find("E_EMPTY_PROGRAM") != std::string::npos);

  auto invalid = run({"parse", s.write("bad.aptly", "Screen1 = Screen()\nW = Widget(Screen1)\n").string()});
  CHECK(invalid.status == 1);
  CHECK(invalid.err.find("bad.aptly:2:5: error: E_UNKNOWN_COMPONENT_TYPE") != std::string::npos);

  auto missing = run({"parse", (s.dir / "nope.aptly").string()});
  CHECK(missing.status == 1);
}

TEST_CASE("cli compile and decompile") {
  Scratch s;
  const auto out = s.dir / "listing1.blocks.json";
  auto c = run({"compile", fixture_path("listing1.aptly").string(), "-o", out.string()});
  REQUIRE(c.status == 0);
  const auto doc = json::parse(read_file(out));
  CHECK(doc.at("workspace").size() == 3);

  auto to_stdout = run({"compile", fixture_path("listing1.aptly").string()});
  CHECK(to_stdout.status == 0);
  CHECK(to_stdout.out == read_file(out));

  auto d = run({"decompile", out.string()});
  CHECK(d.status == 0);
  CHECK(d.out == read_file(golden_path("listing1_canonical.aptly")));

  auto bad = run({"decompile", s.write("v.json", "{}").string()});
  CHECK(bad.status == 1);
  CHECK(bad.err.find("E_BLOCKS_JSON_VERSION") != std::string::npos);
}

TEST_CASE("cli gen with the echo backend") {
  auto r = run({"gen", kListingDescription, "--corpus", fixture_path("corpus.jsonl").string(), "--k", "3", "--backend",
                "mock-echo"});
  CHECK(r.status == 0);
  CHECK(r.out == read_file(golden_path("listing1_canonical.aptly")));
  CHECK(r.err.empty());

  auto shown = run({"gen", kListingDescription, "--corpus", fixture_path("corpus.jsonl").string(), "--show-prompt"});
  CHECK(shown.status == 0);
  CHECK(shown.err.starts_with("Write Aptly code for each app description."));
  CHECK(shown.err.find("### Description:\n" + kListingDescription + "\n### Aptly:\n") != std::string::npos);
}

TEST_CASE("cli gen failures map to exit codes") {
  auto garbage = run({"gen", "a counter", "--corpus", fixture_path("corpus.jsonl").string(), "--backend", "scripted",
                      "--script", fixture_path("garbage_script.json").string()});
  CHECK(garbage.status == 1);
  CHECK(garbage.err.find("E_UNPARSEABLE_OUTPUT") != std::string::npos);
  CHECK(garbage.err.find("this is not aptly") != std::string::npos);
  CHECK(garbage.out.empty());

  auto timeout = run({"gen", "a counter", "--corpus", fixture_path("corpus.jsonl").string(), "--backend", "scripted",
                      "--script", fixture_path("timeout_script.json").string()});
  CHECK(timeout.status == 3);
  CHECK(timeout.err.find("E_BACKEND") != std::string::npos);

  auto no_script = run({"gen", "a counter", "--corpus", fixture_path("corpus.jsonl").string(), "--backend", "scripted"});
  CHECK(no_script.status == 2);

  auto no_corpus = run({"gen", "a counter", "--corpus", "/nonexistent/corpus.jsonl"});
  CHECK(no_corpus.status == 2);

  auto no_key = run({"gen", "a counter", "--corpus", fixture_path("corpus.jsonl").string(), "--backend", "remote",
                     "--url", "http://127.0.0.1:9/v1/completions", "--api-key-env", "APTLY_UNSET_TEST_KEY"});
  CHECK(no_key.status == 3);
}

TEST_CASE("cli edit") {
  auto r = run({"edit", fixture_path("listing1.aptly").string(), "Rename the button to Compute", "--corpus",
                fixture_path("corpus.jsonl").string(), "--backend", "scripted", "--script",
                fixture_path("edit_script.json").string()});
  CHECK(r.status == 0);
  CHECK(r.out.find("Calculate = Button(Screen1, Text = \"Compute\")") != std::string::npos);

  Scratch s;
  auto invalid = run({"edit", s.write("bad.aptly", "Screen1 =").string(), "x", "--corpus",
                      fixture_path("corpus.jsonl").string()});
  CHECK(invalid.status == 1);
  CHECK(invalid.err.find("E_CURRENT_CODE_INVALID") != std::string::npos);
}

TEST_CASE("cli corpus build") {
  Scratch s;
  const auto file = s.dir / "corpus.jsonl";
  std::filesystem::copy_file(fixture_path("corpus.jsonl"), file);
  auto r = run({"corpus", "build", file.string(), "--dim", "32"});
  REQUIRE(r.status == 0);
  std::ifstream in(file);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++lines;
    CHECK(json::parse(line).at("embedding").size() == 32);
  }
  CHECK(lines == 6);
}

TEST_CASE("cli usage errors") {
  CHECK(run({}).status != 0);
  CHECK(run({"frobnicate"}).status != 0);
  CHECK(run({"--help"}).status == 0);
  CHECK(run({"serve", "--config", "/nonexistent/config.json"}).status == 2);
}

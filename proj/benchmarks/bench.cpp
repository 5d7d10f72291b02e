#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>

#include "aptly/blocks.hpp"
#include "aptly/parser.hpp"
#include "aptly/printer.hpp"
#include "aptly/retrieval.hpp"

using namespace aptly;

namespace {

std::string listing1() {
  std::ifstream in(std::string(APTLY_BENCH_DATA) + "/listing1.aptly");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Registry& registry() {
  static const Registry r = *load_registry(APTLY_SEED_REGISTRY);
  return r;
}

Corpus corpus_of(std::size_t n) {
  static const char* words[] = {"button", "label", "draw", "canvas", "speak", "timer", "list", "planet", "ball"};
  std::mt19937_64 rng(n);
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    std::string d;
    for (int j = 0; j < 5; ++j) d += std::string(words[rng() % 9]) + " ";
    c.pairs.push_back({"p" + std::to_string(i), d, "Screen1 = Screen()\n", std::nullopt});
  }
  return corpus_build(std::move(c), MockEmbedder{});
}

void BM_Parse(benchmark::State& state) {
  const std::string src = listing1();
  for (auto _ : state) benchmark::DoNotOptimize(parse(src));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * src.size()));
}
BENCHMARK(BM_Parse);

void BM_Print(benchmark::State& state) {
  const Program p = *parse(listing1());
  for (auto _ : state) benchmark::DoNotOptimize(canonical_print(p));
}
BENCHMARK(BM_Print);

void BM_Compile(benchmark::State& state) {
  const Program p = *parse(listing1());
  for (auto _ : state) benchmark::DoNotOptimize(compile(p, registry()));
}
BENCHMARK(BM_Compile);

void BM_Decompile(benchmark::State& state) {
  const BlockProgram b = *compile(*parse(listing1()), registry());
  for (auto _ : state) benchmark::DoNotOptimize(decompile(b, registry()));
}
BENCHMARK(BM_Decompile);

void BM_TopK(benchmark::State& state) {
  const Corpus c = corpus_of(static_cast<std::size_t>(state.range(0)));
  const MockEmbedder emb;
  for (auto _ : state) benchmark::DoNotOptimize(top_k("draw on a canvas with a ball", c, 3, emb));
}
BENCHMARK(BM_TopK)->Arg(100)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();

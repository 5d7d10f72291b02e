#pragma once

#include <cstdint>
#include <random>

#include "aptly/ast.hpp"
#include "aptly/registry.hpp"

namespace aptly::testing {

struct GenLimits {
  int max_components = 8;
  int max_globals = 3;
  int max_procedures = 3;
  int max_handlers = 4;
  int max_statements = 4;
  int max_depth = 3;  // statement nesting
  int max_expr_depth = 3;
};

/// Random Programs that satisfy every invariant and validate against
/// `registry`. Deterministic for a given seed.
class ProgramGenerator {
 public:
  ProgramGenerator(const Registry& registry, std::uint64_t seed, GenLimits limits = {});

  Program next();

 private:
  struct Proc {
    std::string name;
    std::size_t arity;
    bool has_result;
  };
  struct Scope {
    std::vector<std::string> locals;
  };

  int pick(int lo, int hi);
  bool chance(double p);
  template <typename C>
  const auto& choose(const C& c) {
    return c[static_cast<std::size_t>(pick(0, static_cast<int>(c.size()) - 1))];
  }

  std::string fresh(const char* prefix);
  Literal literal(int depth);
  Literal literal_of(PropType type);
  std::string number_text();
  std::string text_value();
  Expr expr(const Scope& scope, int depth);
  Stmt stmt(Scope& scope, int depth, bool in_result_proc);
  Body body(Scope scope, int depth, bool in_result_proc);

  const Registry& registry_;
  std::mt19937_64 rng_;
  GenLimits limits_;
  int counter_ = 0;
  Program program_;
  std::vector<std::string> globals_;
  std::vector<Proc> procs_;
};

}  // namespace aptly::testing

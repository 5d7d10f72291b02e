#include "aptly/parser.hpp"
#include "aptly/printer.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace aptly;
using namespace aptly::testing;

namespace {

DiagCode first_error(std::string_view src) {
  auto p = parse(src);
  REQUIRE_MESSAGE(!p, src);
  return p.error().front().code;
}

}  // namespace

TEST_CASE("Listing 1 parses to the expected shape") {
  auto p = parse(listing1_source());
  REQUIRE(p);
  CHECK(p->components.size() == 8);
  REQUIRE(p->globals.size() == 1);
  CHECK(p->globals[0].name == "gravities");
  const auto& dict = std::get<DictLit>(std::get<Literal>(p->globals[0].init.node).value);
  REQUIRE(dict.entries.size() == 7);
  const std::vector<std::pair<std::string, std::string>> expected{
      {"Mercury", "0.38"}, {"Venus", "0.91"},  {"Mars", "0.38"},   {"Jupiter", "2.34"},
      {"Saturn", "0.93"},  {"Uranus", "0.92"}, {"Neptune", "1.12"},
  };
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(dict.entries[i].first == expected[i].first);
    CHECK(std::get<NumberLit>(dict.entries[i].second.value).text == expected[i].second);
  }
  REQUIRE(p->procedures.size() == 1);
  CHECK(p->procedures[0].params == std::vector<std::string>{"earth_lbs", "planet"});
  CHECK(p->procedures[0].has_result());
  REQUIRE(p->handlers.size() == 1);
  CHECK(p->handlers[0].component == "Calculate");
  CHECK(p->handlers[0].event == "Click");
}

TEST_CASE("Listing 1 expression structure") {
  auto p = parse(listing1_source());
  REQUIRE(p);
  const auto& ret = std::get<Return>(p->procedures[0].body[0].node);
  const auto& mul = std::get<Binary>(ret.value.node);
  CHECK(mul.op == BinaryOp::Mul);
  CHECK(std::get<LocalRef>(mul.lhs->node).name == "earth_lbs");
  const auto& lookup = std::get<BuiltinCall>(mul.rhs->node);
  CHECK(lookup.name == "dictionaries_lookup");
  REQUIRE(lookup.args.size() == 3);
  CHECK(std::get<GlobalRef>(lookup.args[1].node).name == "gravities");

  const auto& set = std::get<SetProperty>(p->handlers[0].body[0].node);
  CHECK(set.component == "PlanetaryWeight");
  CHECK(set.property == "Text");
  const auto& call = std::get<ProcCall>(set.value.node);
  CHECK(call.name == "compute_weight");
  CHECK(std::get<PropertyRead>(call.args[1].node).property == "Selection");
}

TEST_CASE("minimal program") {
  auto p = parse("Screen1 = Screen()");
  REQUIRE(p);
  CHECK(p->components.size() == 1);
  CHECK(p->globals.empty());
  CHECK(p->procedures.empty());
  CHECK(p->handlers.empty());
}

TEST_CASE("program-level errors") {
  CHECK(first_error("") == DiagCode::EmptyProgram);
  CHECK(first_error("initialize x = 1\n") == DiagCode::EmptyProgram);
  CHECK(first_error("Screen1 = Screen()\nA = Button(Screen1)\nA = Label(Screen1)\n") == DiagCode::DupName);
  CHECK(first_error("Screen1 = Screen()\nA = Button(Nowhere)\n") == DiagCode::UndeclaredParent);
  CHECK(first_error("Screen1 = Screen()\nB = Label(A)\nA = HorizontalArrangement(Screen1)\n") ==
        DiagCode::UndeclaredParent);
  CHECK(first_error("Screen1 = Screen()\nto f():\n  return 1\n  set global x = 2\n") == DiagCode::ReturnPosition);
  CHECK(first_error("Screen1 = Screen()\nto f():\n  if True:\n    return 1\n") == DiagCode::ReturnPosition);
  CHECK(first_error("Screen1 = Screen()\nScreen2 = Screen()\n") == DiagCode::Syntax);
  CHECK(first_error("Screen1 = Screen()\ninitialize x = 1\ninitialize x = 2\n") == DiagCode::DupName);
  CHECK(first_error("Screen1 = Screen()\nto f(a, a):\n  return a\n") == DiagCode::DupName);
  CHECK(first_error("Screen1 = Screen()\nwhen Screen1.Initialize():\n  set x = 1\nwhen Screen1.Initialize():\n"
                    "  set x = 2\n") == DiagCode::DupName);
  CHECK(first_error("Screen1 = Screen()\ninitialize x = 1\nto f(x):\n  return x\n") == DiagCode::DupName);
}

TEST_CASE("syntax errors carry expected-token detail and spans") {
  auto p = parse("Screen1 = Screen()\nwhen Calculate.Click()\n  set x = 1\n");
  REQUIRE(!p);
  const auto& d = p.error().front();
  CHECK(d.code == DiagCode::Syntax);
  CHECK(d.message.find("expected") != std::string::npos);
  CHECK(d.span.line == 2);
}

TEST_CASE("comparisons do not chain") {
  CHECK(first_error("Screen1 = Screen()\ninitialize x = 1 < 2 < 3\n") == DiagCode::Syntax);
  CHECK(parse("Screen1 = Screen()\ninitialize x = (1 < 2) == True\n").has_value());
}

TEST_CASE("component declarations come back in designer pre-order") {
  auto p = parse(
      "Screen1 = Screen()\nA = HorizontalArrangement(Screen1)\nB = Button(Screen1)\nC = Label(A)\n");
  REQUIRE(p);
  std::vector<std::string> names;
  for (const auto& c : p->components) names.push_back(c.name);
  CHECK(names == std::vector<std::string>{"Screen1", "A", "C", "B"});
}

TEST_CASE("top-level forms may interleave") {
  auto p = parse(
      "Screen1 = Screen()\nwhen B.Click():\n  call f()\nB = Button(Screen1)\nto f():\n  set B.Text = \"x\"\n"
      "initialize n = 0\n");
  REQUIRE(p);
  CHECK(p->components.size() == 2);
  CHECK(p->globals.size() == 1);
}

TEST_CASE("statements") {
  const char* src =
      "Screen1 = Screen()\n"
      "C = Canvas(Screen1)\n"
      "initialize items = [1, 2, 3]\n"
      "to walk(n):\n"
      "  for each item in global items:\n"
      "    if item > n:\n"
      "      set n = item\n"
      "    elif item == 0:\n"
      "      C.Clear()\n"
      "    else:\n"
      "      call walk(item - 1)\n"
      "  while not n <= 0:\n"
      "    set n = n - 1\n"
      "    set global items = n\n";
  auto p = parse(src);
  REQUIRE(p);
  const auto& body = p->procedures[0].body;
  REQUIRE(body.size() == 2);
  const auto& loop = std::get<ForEach>(body[0].node);
  CHECK(loop.var == "item");
  const auto& branch = std::get<If>(loop.body[0].node);
  CHECK(branch.elifs.size() == 1);
  CHECK(branch.else_body.has_value());
  CHECK(std::holds_alternative<CallMethod>(branch.elifs[0].body[0].node));
  CHECK(std::holds_alternative<CallProcedure>(branch.else_body->front().node));
  const auto& w = std::get<While>(body[1].node);
  CHECK(std::get<Unary>(w.cond.node).op == UnaryOp::Not);
  CHECK(std::holds_alternative<SetGlobal>(w.body[1].node));
}

TEST_CASE("negative numbers") {
  auto p = parse("Screen1 = Screen()\ninitialize a = -5\ninitialize b = 3 - -2\ninitialize c = - 4\n");
  REQUIRE(p);
  CHECK(std::get<NumberLit>(std::get<Literal>(p->globals[0].init.node).value).text == "-5");
  const auto& b = std::get<Binary>(p->globals[1].init.node);
  CHECK(b.op == BinaryOp::Sub);
  CHECK(std::get<NumberLit>(std::get<Literal>(b.rhs->node).value).text == "-2");
  CHECK(std::get<Unary>(p->globals[2].init.node).op == UnaryOp::Negate);
}

TEST_CASE("property values must be literals") {
  CHECK(first_error("Screen1 = Screen()\nB = Button(Screen1, Text = global x)\n") == DiagCode::Syntax);
  CHECK(first_error("Screen1 = Screen()\nB = Button(Screen1, Text = \"a\", Text = \"b\")\n") == DiagCode::DupName);
  CHECK(first_error("Screen1 = Screen()\ninitialize d = {\"a\": 1, \"a\": 2}\n") == DiagCode::DupName);
}

TEST_CASE("deep nesting is reported, not a crash") {
  std::string src = "Screen1 = Screen()\ninitialize x = " + std::string(5000, '(') + "1" + std::string(5000, ')');
  auto p = parse(src);
  REQUIRE(!p);
  CHECK(p.error().front().code == DiagCode::Syntax);
}

TEST_CASE("diagnostic spans stay inside the input") {
  for (const char* src : {"Screen1 = Screen(", "Screen1 = Screen()\nwhen", "\"abc", "Screen1 = Screen()\n  x",
                          "Screen1 = Screen()\nto f():\n"}) {
    auto p = parse(src);
    REQUIRE(!p);
    std::size_t lines = 1;
    for (const char* c = src; *c; ++c) lines += *c == '\n';
    for (const auto& d : p.error()) {
      CHECK(d.span.line >= 1);
      CHECK(d.span.line <= lines);
      CHECK(d.span.column >= 1);
    }
  }
}

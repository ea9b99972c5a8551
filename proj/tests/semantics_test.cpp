#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hornhs/semantics.hpp"

using namespace hornhs;
using namespace hornhs::semantics;
using syntax::Rel;

namespace {
const Semantics kIrr{Flavor::Irreflexive, false};
const Semantics kRefl{Flavor::Reflexive, false};
}  // namespace

TEST_CASE("relation definitions") {
  CHECK(relation_holds(Rel::L, {1, 3}, {4, 5}, kIrr));
  CHECK_FALSE(relation_holds(Rel::L, {1, 3}, {3, 5}, kIrr));
  CHECK(relation_holds(Rel::B, {2, 5}, {2, 5}, kRefl));
  CHECK_FALSE(relation_holds(Rel::B, {2, 5}, {2, 5}, kIrr));
  CHECK_FALSE(relation_holds(Rel::A, {1, 3}, {3, 3}, kIrr));
  CHECK(relation_holds(Rel::A, {1, 3}, {3, 4}, kIrr));
  CHECK(relation_holds(Rel::O, {0, 2}, {1, 3}, kIrr));
  CHECK_FALSE(relation_holds(Rel::O, {0, 2}, {2, 3}, kIrr));
}

TEST_CASE("frame sizes") {
  CHECK(FiniteFrame(4, kIrr).interval_count() == 10);   // n(n+1)/2
  CHECK(FiniteFrame(4, Semantics{Flavor::Irreflexive, true}).interval_count() == 6);
  CHECK(FiniteFrame(1, kIrr).interval_count() == 1);
}

TEST_CASE("successors") {
  FiniteFrame f3(3, kIrr);
  auto succ = successors(f3, {0, 1}, Rel::E);
  REQUIRE(succ.size() == 1);
  CHECK(succ[0] == Interval{1, 1});

  FiniteFrame f2(2, kRefl);
  auto b = successors(f2, {0, 0}, Rel::B);
  REQUIRE(b.size() == 1);
  CHECK(b[0] == Interval{0, 0});

  CHECK(successors(f3, {0, 2}, Rel::Dbar).empty());
}

TEST_CASE("converse duality") {
  for (int n = 2; n <= 5; ++n)
    for (auto sem : {kIrr, kRefl}) {
      FiniteFrame f(n, sem);
      for (const auto& i : f.intervals())
        for (const auto& j : f.intervals())
          for (Rel r : syntax::all_relations()) {
            if ((r == Rel::A || r == Rel::Abar) && (i.punctual() || j.punctual())) continue;
            CHECK(relation_holds(r, i, j, sem) ==
                  relation_holds(syntax::inverse(r), j, i, sem));
          }
    }
}

TEST_CASE("strict irreflexive relations are pairwise disjoint and irreflexive") {
  Semantics strict{Flavor::Irreflexive, true};
  for (int n = 2; n <= 5; ++n) {
    FiniteFrame f(n, strict);
    for (const auto& i : f.intervals())
      for (const auto& j : f.intervals()) {
        int holding = 0;
        for (Rel r : syntax::all_relations()) {
          if (relation_holds(r, i, j, strict)) ++holding;
          if (i == j) CHECK_FALSE(relation_holds(r, i, j, strict));
        }
        CHECK(holding <= 1);
      }
  }
}

TEST_CASE("eval truth relation") {
  FiniteModel m;
  m.frame = FiniteFrame(2, kIrr);
  m.valuation["p"] = {{0, 1}};
  CHECK(eval(m, {0, 0}, syntax::parse_formula("<A>p").initials[0]));
  CHECK(eval(m, {0, 0}, syntax::mk_true()));

  FiniteModel m3;
  m3.frame = FiniteFrame(3, kIrr);
  auto ebot = syntax::parse_formula("[E]false").initials[0];
  CHECK(eval(m3, {1, 1}, ebot));
  CHECK_FALSE(eval(m3, {0, 1}, ebot));
}

TEST_CASE("eval is monotone in the valuation for positive literals") {
  FiniteModel small, big;
  small.frame = big.frame = FiniteFrame(3, kIrr);
  small.valuation["p"] = {{0, 1}};
  big.valuation["p"] = {{0, 1}, {1, 2}, {2, 2}};
  auto dia = syntax::parse_formula("<B~>p").initials[0];
  for (const auto& iv : small.frame.intervals())
    if (eval(small, iv, dia)) CHECK(eval(big, iv, dia));
}

TEST_CASE("model_satisfies") {
  FiniteModel m;
  m.frame = FiniteFrame(4, kIrr);
  m.valuation["p"] = {{1, 2}};
  auto f = syntax::desugar(syntax::parse_formula("p"));
  auto w = model_satisfies(m, f);
  REQUIRE(w.has_value());
  CHECK(*w == Interval{1, 2});

  auto contra = syntax::desugar(syntax::parse_formula("p ; [U](p -> false)"));
  CHECK_FALSE(model_satisfies(m, contra).has_value());

  FiniteModel full;
  full.frame = FiniteFrame(2, kIrr);
  for (const auto& iv : full.frame.intervals()) full.valuation["q"].insert(iv);
  auto top = syntax::desugar(syntax::parse_formula("[U](true -> q)"));
  auto w2 = model_satisfies(full, top);
  REQUIRE(w2.has_value());
  CHECK(*w2 == Interval{0, 0});
}

TEST_CASE("model file round trip") {
  std::string text =
      "order: chain 4\n"
      "semantics: irrefl\n"
      "strict: false\n"
      "val p: (0,1) (2,3)\n"
      "val q: (1,1)\n";
  auto m = read_model(text);
  CHECK(m.frame.size == 4);
  CHECK(m.holds("p", {0, 1}));
  CHECK(m.holds("q", {1, 1}));
  auto m2 = read_model(write_model(m));
  CHECK(m2.valuation == m.valuation);

  CHECK_THROWS_AS(read_model("order: chain 2\nbogus: 1\n"), ModelIoError);
  CHECK_THROWS_AS(read_model("order: chain 2\nval p: (0,5)\n"), ModelIoError);
  CHECK_THROWS_AS(read_model("semantics: refl\n"), ModelIoError);
}

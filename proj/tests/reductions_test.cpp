#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "hornhs/oracle.hpp"
#include "hornhs/reductions.hpp"

using namespace hornhs;
using namespace hornhs::reductions;
using semantics::Flavor;
using semantics::Interval;
using semantics::Semantics;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

TuringMachine fixture_tm(const std::string& name) { return read_tm(slurp(name)); }

}  // namespace

TEST_CASE("tm parsing and validation") {
  auto tm = fixture_tm("bouncer.tm");
  CHECK(tm.states.size() == 4);
  CHECK(tm.blank() == "_");
  CHECK(tm.step("q0", "$").kind == TuringMachine::Action::Kind::MoveRight);

  CHECK_THROWS_AS(read_tm("states: q0 qf\ninitial: q0\nhalt: qf\nalphabet: _\n"
                          "delta: q0,$ -> qf,L\ndelta: q0,_ -> qf,R\n"),
                  TmError);  // must move right on the marker
  CHECK_THROWS_AS(read_tm("states: q0 qf\ninitial: q0\nhalt: qf\nalphabet: _ L\n"
                          "delta: q0,$ -> qf,R\ndelta: q0,_ -> qf,R\n"),
                  TmError);  // L is reserved
  CHECK_THROWS_AS(read_tm("states: q0 qf\ninitial: q0\nhalt: qf\nalphabet: _ a\n"
                          "delta: q0,$ -> qf,R\n"),
                  TmError);  // not total
  // lowercase moves are normalized
  auto tm2 = read_tm("states: q0 qf\ninitial: q0\nhalt: qf\nalphabet: _\n"
                     "delta: q0,$ -> qf,r\ndelta: q0,_ -> qf,r\n");
  CHECK(tm2.step("q0", "_").kind == TuringMachine::Action::Kind::MoveRight);
}

TEST_CASE("simulation") {
  auto halter = fixture_tm("halter.tm");
  auto run = simulate(halter, 5, ConfigConvention::Growing);
  CHECK(run.size() == 2);  // halts at step 1
  CHECK(run[0][0] == Cell{true, "q0", "$"});
  CHECK(halts_within(halter, 5));

  auto bouncer = fixture_tm("bouncer.tm");
  auto run2 = simulate(bouncer, 10, ConfigConvention::Growing);
  CHECK(run2.size() == 10);
  for (size_t n = 0; n < run2.size(); ++n) {
    CHECK(run2[n].size() == n + 2);
    CHECK(run2[n].back() == Cell{false, "", "_"});  // last cell stays blank
  }
  CHECK_FALSE(halts_within(bouncer, 50));

  auto fixed = simulate(bouncer, 10, ConfigConvention::Fixed, 12);
  for (const auto& c : fixed) CHECK(c.size() == 12);
}

TEST_CASE("w_set membership") {
  auto tm = fixture_tm("bouncer.tm");
  Cell lend{false, "", "$"}, blank{false, "", "_"}, a{false, "", "a"};
  Cell head0{true, "q0", "$"};
  CHECK(in_w_set(tm, {lend, a, blank}));
  CHECK(in_w_set(tm, {head0, blank, lend}));
  CHECK_FALSE(in_w_set(tm, {Cell{true, "qf", "a"}, a, a}));
  CHECK_FALSE(in_w_set(tm, {a, lend, a}));
  auto w = w_set(tm);
  for (const auto& t : w) CHECK(in_w_set(tm, t));
  CHECK(w.size() > 20);
}

TEST_CASE("tau cases") {
  auto tm = fixture_tm("bouncer.tm");
  Cell blank{false, "", "_"}, a{false, "", "a"};
  // head on x moving right: the head lands on y
  Cell x{true, "qr", "a"};  // delta(qr,a) = (qr,R)
  CHECK(tau(tm, {x, a, blank}) == Cell{true, "qr", "a"});
  // no head nearby: y is copied
  CHECK(tau(tm, {a, a, blank}) == a);
  // y writes: delta(qr,_) = (ql,a)
  CHECK(tau(tm, {a, Cell{true, "qr", "_"}, blank}) == Cell{true, "ql", "a"});
  // y moves: the underlying symbol stays
  CHECK(tau(tm, {a, Cell{true, "ql", "a"}, a}) == a);
  // z moves left onto y
  CHECK(tau(tm, {a, a, Cell{true, "ql", "a"}}) == Cell{true, "ql", "a"});
  CHECK_THROWS_AS(tau(tm, {a, Cell{false, "", "$"}, a}), TmError);
}

TEST_CASE("tau determines the computation") {
  for (const char* name : {"halter.tm", "bouncer.tm", "counter.tm"}) {
    CAPTURE(name);
    auto tm = fixture_tm(name);
    auto run = simulate(tm, 11, ConfigConvention::Growing);
    Cell blank{false, "", tm.blank()};
    for (size_t n = 1; n < run.size(); ++n) {
      const auto& prev = run[n - 1];
      const auto& cur = run[n];
      REQUIRE(cur.size() == n + 2);
      CHECK(cur[n + 1] == blank);
      for (size_t m = 0; m <= n; ++m) {
        Cell expect;
        if (m == 0)
          expect = tau(tm, {blank, prev[0], prev[1]});
        else if (m < n)
          expect = tau(tm, {prev[m - 1], prev[m], prev[m + 1]});
        else
          expect = tau(tm, {prev[n - 1], blank, cur[0]});
        CHECK(cur[m] == expect);
      }
    }
  }
}

TEST_CASE("grid enumeration") {
  CHECK(grid_point(0) == GridPoint{0, 0});
  CHECK(grid_point(1) == GridPoint{0, 1});
  CHECK(grid_point(2) == GridPoint{1, 1});
  CHECK(grid_point(5) == GridPoint{2, 2});
  CHECK(grid_point(9) == GridPoint{3, 3});
  for (int n = 0; n < 200; ++n) CHECK(grid_index(grid_point(n)) == n);
  CHECK(up_neighbour(0) == 1);
  CHECK(up_neighbour(1) == 3);
  CHECK(up_neighbour(2) == 4);
  CHECK(up_neighbour(5) == 8);
  CHECK(on_diagonal(0));
  CHECK(on_diagonal(2));
  CHECK(on_diagonal(5));
  CHECK_FALSE(on_diagonal(1));
}

TEST_CASE("binary implication tricks") {
  syntax::FreshVars fv;
  auto cls = binary_implication_h(syntax::mk_var("a"), syntax::mk_var("b"),
                                  syntax::mk_var("c"), fv);
  CHECK(cls.size() == 7);
  syntax::Formula f;
  f.initials.push_back(syntax::mk_var("a"));
  f.clauses = cls;
  auto info = syntax::classify(f);
  CHECK(info.is_horn);
  CHECK(info.is_core);

  syntax::FreshVars fv2;
  auto diag = binary_implication_diag(syntax::mk_var("a"), syntax::mk_var("b"),
                                      syntax::mk_var("c"), fv2);
  CHECK(diag.size() == 3);
  syntax::Formula fd;
  fd.initials.push_back(syntax::mk_var("a"));
  fd.clauses = diag;
  auto infod = syntax::classify(fd);
  CHECK(infod.is_core);
  CHECK(infod.box_only);

  syntax::FreshVars fv3;
  auto nw = nw_next({syntax::mk_var("a")}, syntax::mk_var("b"), fv3);
  std::set<std::string> fresh;
  for (const auto& c : nw) {
    for (const auto& b : c.body)
      if (b->kind == syntax::Kind::Var && b->var[0] == '_') fresh.insert(b->var);
    std::vector<syntax::ExprPtr> stack{c.head};
    while (!stack.empty()) {
      auto e = stack.back();
      stack.pop_back();
      if (e->kind == syntax::Kind::Var && e->var[0] == '_') fresh.insert(e->var);
      if (e->arg) stack.push_back(e->arg);
    }
  }
  CHECK(fresh.size() == 5);
  syntax::Formula fn;
  fn.initials.push_back(syntax::mk_var("a"));
  fn.clauses = nw;
  CHECK(syntax::classify(fn).box_only);
}

TEST_CASE("the vertical trick mirrors the horizontal one") {
  syntax::FreshVars fva, fvb;
  auto h = binary_implication_h(syntax::mk_var("a"), syntax::mk_var("b"),
                                syntax::mk_var("c"), fva);
  auto v = binary_implication_v(syntax::mk_var("a"), syntax::mk_var("b"),
                                syntax::mk_var("c"), fvb);
  REQUIRE(h.size() == v.size());
  for (size_t i = 0; i < h.size(); ++i) {
    syntax::Clause mirrored;
    for (const auto& b : h[i].body) mirrored.body.push_back(syntax::mirror(b));
    mirrored.head = syntax::mirror(h[i].head);
    CHECK(syntax::render(mirrored.head) == syntax::render(v[i].head));
    REQUIRE(mirrored.body.size() == v[i].body.size());
    for (size_t j = 0; j < mirrored.body.size(); ++j)
      CHECK(syntax::render(mirrored.body[j]) == syntax::render(v[i].body[j]));
  }
}

TEST_CASE("trick claims verified exhaustively") {
  for (const auto& rep : verify_trick_claims(3)) {
    CAPTURE(rep.name);
    CAPTURE(rep.detail);
    CHECK(rep.ok);
    CHECK(rep.cases > 0);
  }
}

TEST_CASE("generators are deterministic and land in their fragments") {
  auto tm = fixture_tm("bouncer.tm");
  GeneratorOptions plain, fin;
  fin.fin = true;

  struct Case {
    const char* name;
    syntax::Formula f1, f2;
    bool core, box_only, diamond_only;
  };
  auto mk = [&](const char* name, auto gen, bool core, bool box_only,
                bool diamond_only) {
    return Case{name, syntax::desugar(gen()), syntax::desugar(gen()), core, box_only,
                diamond_only};
  };
  std::vector<Case> cases;
  cases.push_back(mk("pspace-core", [&] { return gen_pspace_core(tm, 3, plain); }, true,
                     false, false));
  cases.push_back(mk("pspace-box", [&] { return gen_pspace_box_core(tm, 3, plain); },
                     true, true, false));
  cases.push_back(mk("diamond-horn", [&] { return gen_diamond_horn(tm, plain); }, false,
                     false, true));
  cases.push_back(mk("diamond-horn-refl",
                     [&] { return gen_diamond_horn_refl(tm, plain); }, false, false,
                     true));
  cases.push_back(mk("core-irrefl", [&] { return gen_core_irreflexive(tm, plain); },
                     true, false, false));
  cases.push_back(mk("box-horn", [&] { return gen_box_horn_discrete(tm, plain); }, false,
                     true, false));
  for (const auto& c : cases) {
    CAPTURE(c.name);
    CHECK(syntax::render(c.f1) == syntax::render(c.f2));
    auto info = syntax::classify(c.f1);
    CHECK(info.is_horn);
    CHECK(info.is_core == c.core);
    CHECK(info.box_only == c.box_only);
    CHECK(info.diamond_only == c.diamond_only);
  }

  // Finite variants stay inside the same fragments.
  CHECK(syntax::classify(syntax::desugar(gen_pspace_core(tm, 3, fin))).is_core);
  auto fin_box = syntax::classify(syntax::desugar(gen_pspace_box_core(tm, 3, fin)));
  CHECK(fin_box.is_core);
  CHECK(fin_box.box_only);
  auto fin_dia = syntax::classify(syntax::desugar(gen_diamond_horn(tm, fin)));
  CHECK(fin_dia.diamond_only);
  auto fin_core = syntax::classify(syntax::desugar(gen_core_irreflexive(tm, fin)));
  CHECK(fin_core.is_core);
  auto fin_bh = syntax::classify(syntax::desugar(gen_box_horn_discrete(tm, fin)));
  CHECK(fin_bh.box_only);
}

TEST_CASE("generator sizes stay polynomial") {
  auto tm = fixture_tm("bouncer.tm");
  GeneratorOptions o;
  long gamma = static_cast<long>(gamma_symbols(tm).size());
  for (int n : {2, 3, 5}) {
    auto core = gen_pspace_core(tm, n, o);
    auto boxc = gen_pspace_box_core(tm, n, o);
    long envelope = 30l * n * n * gamma * gamma;
    CHECK(static_cast<long>(core.clauses.size()) <= envelope);
    CHECK(static_cast<long>(boxc.clauses.size()) <= envelope);
    // Uniqueness block: one clause per ordered pair of distinct contents.
    long uniq = 0;
    for (const auto& c : core.clauses)
      if (c.body.size() == 2 && c.head->kind == syntax::Kind::False &&
          c.body[0]->kind == syntax::Kind::Var &&
          c.body[0]->var.rfind("cell_", 0) == 0 &&
          c.body[1]->kind == syntax::Kind::Var &&
          c.body[1]->var.rfind("cell_", 0) == 0)
        ++uniq;
    CHECK(uniq == n * gamma * (gamma - 1));
  }
}

TEST_CASE("pspace initial conditions") {
  auto tm = fixture_tm("bouncer.tm");
  GeneratorOptions o;
  auto f = gen_pspace_core(tm, 4, o);
  REQUIRE(f.initials.size() == 4);
  CHECK(syntax::render(f.initials[0]) == "cell_0_h_q0_lend");
  CHECK(syntax::render(f.initials[1]) == "cell_1_blank");
}

TEST_CASE("unit definition singles out punctual intervals") {
  // Any chain-4 model of the unit clauses of the box-core generator marks
  // exactly the punctual intervals.
  auto tm = fixture_tm("halter.tm");
  GeneratorOptions o;
  auto f = syntax::desugar(gen_pspace_box_core(tm, 2, o));
  syntax::Formula unit_clauses;
  for (const auto& c : f.clauses) {
    bool about_unit = false;
    auto scan = [&](const syntax::ExprPtr& e) {
      if (e->kind == syntax::Kind::Var && e->var == "unit") about_unit = true;
    };
    for (const auto& b : c.body) scan(b);
    scan(c.head);
    if (about_unit) unit_clauses.clauses.push_back(c);
  }
  REQUIRE(unit_clauses.clauses.size() == 2);
  semantics::FiniteFrame chain4(4, Semantics{Flavor::Irreflexive, false});
  auto rep = oracle::check_claim_on_all_models(
      unit_clauses,
      [&](const semantics::FiniteModel& m, const Interval&) {
        for (const auto& iv : chain4.intervals())
          if (m.holds("unit", iv) != iv.punctual()) return false;
        return true;
      },
      {"unit"}, chain4);
  CHECK(rep.ok);
}

TEST_CASE("window check on an empty clause set") {
  semantics::FiniteModel m;
  m.frame = semantics::FiniteFrame(3, Semantics{Flavor::Irreflexive, false});
  syntax::Formula f;
  f.initials.push_back(syntax::mk_true());
  auto rep = check_window(m, f, {0, 0}, 0);
  CHECK(rep.ok());
  CHECK(rep.instances == 0);
}

TEST_CASE("soundness model rejects bad requests") {
  CHECK_THROWS_AS(build_soundness_model(fixture_tm("bouncer.tm"),
                                        Construction::PspaceCore, 0),
                  TmError);
  CHECK_THROWS_AS(build_soundness_model(fixture_tm("halter.tm"),
                                        Construction::PspaceCore, 8),
                  TmError);
}

TEST_CASE("grid soundness model places the pointers as intended") {
  auto sm = build_soundness_model(fixture_tm("bouncer.tm"), Construction::DiamondHorn, 12);
  const auto& m = sm.model;
  // Diagonal units of the enumeration.
  for (int k : {0, 2, 5, 9}) CHECK(m.holds("diag", {k, k + 1}));
  for (int k : {1, 3, 4, 6, 7, 8, 10, 11}) CHECK(m.holds("diagb", {k, k + 1}));
  CHECK(m.holds("now", {0, 1}));
  // Up pointers span from the source unit's start to the target unit's end.
  CHECK(m.holds("up", {0, 2}));   // up(0) = 1
  CHECK(m.holds("up", {1, 4}));   // up(1) = 3
  CHECK(m.holds("up", {2, 5}));   // up(2) = 4
  CHECK(m.holds("up", {3, 7}));   // up(3) = 6
  CHECK(m.holds("up", {5, 9}));   // up(5) = 8
  CHECK_FALSE(m.holds("up", {0, 3}));
  // The first configuration cell sits on grid point 1.
  CHECK(m.holds("g_h_q0_lend", {1, 2}));
  CHECK(m.holds("g_blank", {0, 1}));
}

TEST_CASE("bounded windows pass for the diverging bouncer") {
  auto tm = fixture_tm("bouncer.tm");

  auto phi = build_soundness_model(tm, Construction::PspaceCore, 12);
  auto rep = check_window(phi.model, phi.formula, phi.seed, 4);
  CHECK(rep.initials_ok);
  CHECK(rep.failures.empty());
  CHECK(rep.instances > 1000);

  auto psi = build_soundness_model(tm, Construction::DiamondHorn, 12);
  auto rep2 = check_window(psi.model, psi.formula, psi.seed, 3);
  CHECK(rep2.initials_ok);
  CHECK(rep2.failures.empty());
  CHECK(rep2.instances > 1000);
}

TEST_CASE("a single dropped fact produces a localized failure") {
  auto tm = fixture_tm("bouncer.tm");
  auto phi = build_soundness_model(tm, Construction::PspaceCore, 8);
  // Drop one copied (non-head) cell fact from a mid-window column; the copy
  // gadget pins those at every start point.
  auto corrupted = phi.model;
  std::string victim = "cell_2_blank";
  REQUIRE(corrupted.holds(victim, {8, 8}));
  corrupted.valuation[victim].erase({8, 8});
  auto rep = check_window(corrupted, phi.formula, phi.seed, 4);
  REQUIRE_FALSE(rep.failures.empty());
  CHECK(rep.failures.size() < 50);
  // Every failing clause mentions the corrupted cell variable.
  for (const auto& fl : rep.failures) {
    const auto& c = phi.formula.clauses[fl.clause];
    bool mentions = false;
    auto scan = [&](const syntax::ExprPtr& e, auto&& self) -> void {
      if (e->kind == syntax::Kind::Var && e->var == victim) mentions = true;
      if (e->arg) self(e->arg, self);
    };
    for (const auto& b : c.body) scan(b, scan);
    scan(c.head, scan);
    CHECK(mentions);
  }
}

TEST_CASE("core encoding soundness window") {
  auto tm = fixture_tm("bouncer.tm");
  auto sm = build_soundness_model(tm, Construction::CoreIrrefl, 12);
  const auto& m = sm.model;
  // Spaced unit chain with line spans, walls and pointers.
  auto u = [](int k) { return 3 + 2 * k; };
  CHECK(m.holds("unit", {u(0), u(1)}));
  CHECK(m.holds("now", {u(0), u(1)}));
  CHECK(m.holds("diag", {u(0), u(1)}));
  CHECK(m.holds("wall", {u(1), u(2)}));   // line 1 starts at point 1
  CHECK(m.holds("line", {u(1), u(3)}));   // spans points 1..2
  CHECK(m.holds("line", {u(3), u(6)}));   // line 2 spans points 3..5
  CHECK(m.holds("up", {u(0), u(2)}));     // up(0) = 1
  CHECK(m.holds("up", {u(2), u(5)}));     // up(2) = 4
  CHECK(m.holds("g_h_q0_lend", {u(1), u(2)}));

  int hi = m.frame.size - 1 - (3 + 2 * 12);
  auto rep = check_window(m, sm.formula, sm.seed, 3, hi);
  CHECK(rep.initials_ok);
  CHECK(rep.failures.empty());
  CHECK(rep.instances > 1000);

  // Dropping a pointer breaks locally.
  auto corrupted = m;
  REQUIRE(corrupted.holds("up", {u(2), u(5)}));
  corrupted.valuation["up"].erase({u(2), u(5)});
  auto bad = check_window(corrupted, sm.formula, sm.seed, 3, hi);
  CHECK_FALSE(bad.failures.empty());
}

TEST_CASE("box encoding soundness window") {
  auto tm = fixture_tm("bouncer.tm");
  auto sm = build_soundness_model(tm, Construction::BoxHorn, 12);
  const auto& m = sm.model;
  // Blocks start at s(1)=2, s(i+1)=s(i)+2i+2.
  std::vector<int> s{0, 2};
  for (int i = 1; i <= 12; ++i) s.push_back(s[i] + 2 * i + 2);
  CHECK(m.holds("init", {2, 3}));
  CHECK(m.holds("wall", {s[2], s[2] + 1}));
  CHECK(m.holds("diag", {s[2] + 2, s[2] + 3}));
  CHECK(m.holds("firstm", {s[1] + 2, s[1] + 3}));
  // The wall unit doubles as the last copy unit of its line.
  CHECK(m.holds("gridc", {s[2], s[2] + 1}));
  CHECK(m.holds("mirror", {s[1], s[2] + 1}));  // the wall's mirror is the last one
  CHECK(m.holds("lastm", {s[1], s[2] + 1}));
  CHECK(m.holds("up", {s[1] - 1, s[1] + 2}));  // bootstrap pointer
  CHECK(m.holds("lastup", {s[1] - 1, s[1] + 2}));
  CHECK(m.holds("g_h_q0_lend", {2, 3}));

  int top = m.frame.size - 1;
  int hi = top - (s[4] + 5);  // active through line 4's proper block
  auto rep = check_window(m, sm.formula, sm.seed, 1, hi);
  CHECK(rep.initials_ok);
  CHECK(rep.failures.empty());
  CHECK(rep.instances > 1000);

  // Dropping one copied cell breaks locally.
  auto corrupted = m;
  std::string victim = "g_" + cell_token(simulate(tm, 3, ConfigConvention::Growing)[1][1]);
  REQUIRE(corrupted.holds(victim, {s[2] + 1, s[2] + 2}));
  corrupted.valuation[victim].erase({s[2] + 1, s[2] + 2});
  auto bad = check_window(corrupted, sm.formula, sm.seed, 1, hi);
  CHECK_FALSE(bad.failures.empty());
}

#include <algorithm>
#include <functional>

#include "hornhs/reductions.hpp"

namespace hornhs::reductions {

using syntax::Clause;
using syntax::ExprPtr;
using syntax::Formula;
using syntax::FreshVars;
using syntax::Kind;
using syntax::mk_and;
using syntax::mk_box;
using syntax::mk_dia;
using syntax::mk_false;
using syntax::mk_impl;
using syntax::mk_not;
using syntax::mk_true;
using syntax::mk_var;
using syntax::Rel;

namespace {

// The relations whose diamond reaches an interval lying strictly in the
// future; used by the finite-satisfiability surgery as <R>end guards.
const Rel kEndGuards[] = {Rel::A, Rel::Bbar, Rel::Dbar, Rel::L, Rel::O};

struct FinCtx {
  bool fin = false;
  ExprPtr end;  // the end variable when fin
};

void push(std::vector<Clause>& out, std::vector<ExprPtr> body, ExprPtr head) {
  out.push_back(Clause{std::move(body), std::move(head)});
}

// Emits a generating clause, replicating it under <R>end guards in the
// finite variant.
void push_generating(std::vector<Clause>& out, const FinCtx& fc, std::vector<ExprPtr> body,
                     ExprPtr head) {
  if (!fc.fin) {
    push(out, std::move(body), std::move(head));
    return;
  }
  for (Rel r : kEndGuards) {
    std::vector<ExprPtr> guarded{mk_dia(r, fc.end)};
    for (const auto& b : body) guarded.push_back(b);
    push(out, std::move(guarded), head);
  }
}

ExprPtr cell_var(const std::string& prefix, int i, const Cell& c) {
  return mk_var(prefix + "_" + std::to_string(i) + "_" + cell_token(c));
}

ExprPtr gamma_var(const Cell& c) { return mk_var("g_" + cell_token(c)); }

std::vector<Cell> tape_symbols(const TuringMachine& tm) {
  std::vector<Cell> out;
  for (const auto& s : tm.alphabet) out.push_back(Cell{false, "", s});
  out.push_back(Cell{false, "", "$"});
  return out;
}

std::vector<Cell> head_symbols(const TuringMachine& tm, bool include_halt) {
  std::vector<Cell> out;
  for (const auto& q : tm.states) {
    if (!include_halt && q == tm.halt) continue;
    for (const auto& s : tm.alphabet) out.push_back(Cell{true, q, s});
    out.push_back(Cell{true, q, "$"});
  }
  return out;
}

// grid_succ_->[l1, l2] and grid_succ_^[l1, l2] of the diamond encoding.
void grid_succ(std::vector<Clause>& out, const FinCtx& fc, bool up, const ExprPtr& l1,
               const ExprPtr& l2, const ExprPtr& unit) {
  Rel step = up ? Rel::Bbar : Rel::E;
  Rel cross = up ? Rel::E : Rel::B;
  push(out, {l1, mk_dia(step, l1)}, mk_false());
  push(out, {l2, mk_dia(step, l2)}, mk_false());
  push_generating(out, fc, {l1}, mk_dia(step, l2));
  push(out, {l1},
       mk_box(step, mk_impl({mk_dia(step, l2)}, mk_not(mk_dia(cross, unit)))));
}

// Cover trick: forces lambda / lambdabar to cover every interval.
void cover(std::vector<Clause>& out, const FinCtx& fc, bool horizontal, const ExprPtr& l,
           const ExprPtr& lbar, FreshVars& fv) {
  Rel outer = horizontal ? Rel::Bbar : Rel::E;
  Rel inner = horizontal ? Rel::E : Rel::Bbar;
  auto mv = mk_var(fv.next("cover")), xv = mk_var(fv.next("cover")),
       yv = mk_var(fv.next("cover"));
  push_generating(out, fc, {mk_true()},
                  mk_dia(outer, mk_and({mv, mk_dia(inner, xv), mk_dia(inner, yv)})));
  push(out, {xv, yv}, mk_false());
  push(out, {mk_dia(outer, mk_and({mv, mk_dia(inner, mk_and({yv, mk_dia(inner, xv)}))}))},
       l);
  push(out, {mk_dia(outer, mk_and({mv, mk_dia(inner, mk_and({xv, mk_dia(inner, yv)}))}))},
       lbar);
  push(out, {l, lbar}, mk_false());
}

// Horizontal / vertical successor squares over the chessboard.
void succ_sq(std::vector<Clause>& out, const FinCtx& fc, bool horizontal, const ExprPtr& p,
             const ExprPtr& q, const ExprPtr& tick, const ExprPtr& tickbar, FreshVars& fv) {
  Rel mv = horizontal ? Rel::E : Rel::Bbar;
  auto pbar = mk_var(fv.next("sq")), qbar = mk_var(fv.next("sq"));
  auto p1 = mk_var(fv.next("sq")), q1 = mk_var(fv.next("sq"));
  auto p2 = mk_var(fv.next("sq")), q2 = mk_var(fv.next("sq"));
  push_generating(out, fc, {p, tick}, mk_dia(mv, mk_and({q, tickbar})));
  push_generating(out, fc, {p, tickbar}, mk_dia(mv, mk_and({q, tick})));
  push(out, {p, pbar}, mk_false());
  push(out, {q, qbar}, mk_false());
  // tick block
  push(out, {p, tick}, mk_box(mv, p1));
  push(out, {p1, tickbar}, pbar);
  push(out, {p1, tickbar}, mk_box(mv, pbar));
  push(out, {q, tickbar}, mk_box(mv, q1));
  push(out, {q1, tick}, qbar);
  push(out, {q1, tick}, mk_box(mv, qbar));
  push(out, {p1, tick, mk_dia(mv, mk_and({q, tickbar}))}, p);
  push(out, {p1, tickbar, mk_dia(mv, q)}, q);
  // tickbar block
  push(out, {p, tickbar}, mk_box(mv, p2));
  push(out, {p2, tick}, pbar);
  push(out, {p2, tick}, mk_box(mv, pbar));
  push(out, {q, tick}, mk_box(mv, q2));
  push(out, {q2, tickbar}, qbar);
  push(out, {q2, tickbar}, mk_box(mv, qbar));
  push(out, {p2, tickbar, mk_dia(mv, mk_and({q, tick}))}, p);
  push(out, {p2, tick, mk_dia(mv, q)}, q);
  push(out, {q, p}, mk_false());
  push(out, {q, mk_dia(mv, p)}, mk_false());
}

void fill(std::vector<Clause>& out, const FinCtx& fc, const ExprPtr& p, const ExprPtr& htick,
          const ExprPtr& htickbar, const ExprPtr& vtick, const ExprPtr& vtickbar,
          FreshVars& fv) {
  auto pl = mk_var(fv.next("fill")), pr = mk_var(fv.next("fill"));
  auto pd = mk_var(fv.next("fill")), pu = mk_var(fv.next("fill"));
  succ_sq(out, fc, true, pl, p, htick, htickbar, fv);
  succ_sq(out, fc, true, p, pr, htick, htickbar, fv);
  succ_sq(out, fc, false, pd, p, vtick, vtickbar, fv);
  succ_sq(out, fc, false, p, pu, vtick, vtickbar, fv);
}

// Shared by the diamond-Horn and core encodings: TM variables on the grid.
void tm_grid_common(std::vector<Clause>& out, const TuringMachine& tm, const ExprPtr& unit,
                    const ExprPtr& diag) {
  auto gamma = gamma_symbols(tm);
  for (const auto& x : gamma) push(out, {gamma_var(x)}, unit);
  for (const auto& x : gamma)
    for (const auto& y : gamma)
      if (!(x == y)) push(out, {gamma_var(x), gamma_var(y)}, mk_false());
  push(out, {diag}, gamma_var(Cell{false, "", tm.blank()}));
}

void nonhalting_clauses(std::vector<Clause>& out, const TuringMachine& tm,
                        const std::function<ExprPtr(const Cell&)>& var) {
  for (const auto& s : tm.alphabet) out.push_back(Clause{{var(Cell{true, tm.halt, s})}, mk_false()});
  out.push_back(Clause{{var(Cell{true, tm.halt, "$"})}, mk_false()});
}

void end_surgery(std::vector<Clause>& out, const TuringMachine& tm, const ExprPtr& end,
                 const ExprPtr& unit) {
  push(out, {end}, unit);
  for (const auto& x : gamma_symbols(tm)) {
    if (x.head && x.state == tm.halt) continue;
    push(out, {end, gamma_var(x)}, mk_false());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// PSpace generators (fixed-length configurations)

Formula gen_pspace_core(const TuringMachine& tm, int n_cells, const GeneratorOptions& o) {
  return gen_pspace_core_traced(tm, n_cells, o, nullptr);
}

Formula gen_pspace_core_traced(const TuringMachine& tm, int n_cells,
                               const GeneratorOptions& o, std::vector<BimpTrace>* trace) {
  if (n_cells < 2) throw TmError("PSpace generators need at least 2 cells");
  tm.validate();
  const int n = n_cells;
  FreshVars fv;
  Formula f;
  auto gamma = gamma_symbols(tm);
  auto tapes = tape_symbols(tm);
  auto heads = head_symbols(tm, false);
  auto unit = mk_var("unit");

  // initialisation
  f.initials.push_back(cell_var("cell", 0, Cell{true, tm.initial, "$"}));
  for (int i = 1; i < n; ++i)
    f.initials.push_back(cell_var("cell", i, Cell{false, "", tm.blank()}));

  auto& out = f.clauses;
  // uniqueness of cell contents
  for (int i = 0; i < n; ++i)
    for (const auto& z : gamma)
      for (const auto& z2 : gamma)
        if (!(z == z2)) push(out, {cell_var("cell", i, z), cell_var("cell", i, z2)}, mk_false());
  // copies into the next unit
  for (int i = 0; i < n; ++i)
    for (const auto& h : heads)
      push(out, {cell_var("cell", i, h)}, mk_dia(Rel::A, cell_var("cellb", i, h)));
  for (int i = 0; i < n; ++i)
    for (const auto& h : heads)
      for (int j = 0; j < n; ++j)
        for (const auto& z : tapes) {
          auto cls = binary_implication_h(cell_var("cell", i, h), cell_var("cell", j, z),
                                          mk_dia(Rel::A, cell_var("cellb", j, z)), fv, trace);
          for (auto& c : cls) out.push_back(std::move(c));
          push(out, {cell_var("cellb", i, h), mk_dia(Rel::B, cell_var("cellb", j, z))},
               mk_false());
        }
  // bar cells are non-punctual units
  for (int i = 0; i < n; ++i)
    for (const auto& h : head_symbols(tm, true))
      push(out, {cell_var("cellb", i, h)}, unit);
  push(out, {unit, mk_box(Rel::D, unit)}, mk_false());

  // transition steps
  using K = TuringMachine::Action::Kind;
  for (const auto& h : heads) {
    const auto& act = tm.step(h.state, h.symbol);
    auto plain = Cell{false, "", h.symbol};
    if (act.kind == K::Write) {
      auto written = Cell{true, act.state, act.symbol};
      for (int i = 0; i < n; ++i)
        push(out, {cell_var("cellb", i, h)}, cell_var("cell", i, written));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          for (const auto& z : tapes) {
            auto cls = binary_implication_h(
                cell_var("cellb", i, h), mk_dia(Rel::Bbar, cell_var("cellb", j, z)),
                cell_var("cell", j, z), fv, trace);
            for (auto& c : cls) out.push_back(std::move(c));
          }
        }
    } else if (act.kind == K::MoveRight) {
      for (int i = 0; i + 1 < n; ++i)
        push(out, {cell_var("cellb", i, h)}, cell_var("cell", i, plain));
      for (int i = 0; i + 1 < n; ++i)
        for (const auto& z : tapes) {
          auto marked = Cell{true, act.state, z.symbol};
          auto cls = binary_implication_h(
              cell_var("cellb", i, h), mk_dia(Rel::Bbar, cell_var("cellb", i + 1, z)),
              cell_var("cell", i + 1, marked), fv, trace);
          for (auto& c : cls) out.push_back(std::move(c));
        }
      for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (j == i || j == i + 1) continue;
          for (const auto& z : tapes) {
            auto cls = binary_implication_h(
                cell_var("cellb", i, h), mk_dia(Rel::Bbar, cell_var("cellb", j, z)),
                cell_var("cell", j, z), fv, trace);
            for (auto& c : cls) out.push_back(std::move(c));
          }
        }
    } else {  // MoveLeft
      for (int i = 1; i < n; ++i)
        push(out, {cell_var("cellb", i, h)}, cell_var("cell", i, plain));
      for (int i = 1; i < n; ++i)
        for (const auto& z : tapes) {
          auto marked = Cell{true, act.state, z.symbol};
          auto cls = binary_implication_h(
              cell_var("cellb", i, h), mk_dia(Rel::Bbar, cell_var("cellb", i - 1, z)),
              cell_var("cell", i - 1, marked), fv, trace);
          for (auto& c : cls) out.push_back(std::move(c));
        }
      for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (j == i || j == i - 1) continue;
          for (const auto& z : tapes) {
            auto cls = binary_implication_h(
                cell_var("cellb", i, h), mk_dia(Rel::Bbar, cell_var("cellb", j, z)),
                cell_var("cell", j, z), fv, trace);
            for (auto& c : cls) out.push_back(std::move(c));
          }
        }
    }
  }
  if (!o.fin)
    for (int i = 0; i < n; ++i)
      for (const auto& s : tape_symbols(tm))
        push(out, {cell_var("cell", i, Cell{true, tm.halt, s.symbol})}, mk_false());
  return f;
}

Formula gen_pspace_box_core(const TuringMachine& tm, int n_cells,
                            const GeneratorOptions& o) {
  if (n_cells < 2) throw TmError("PSpace generators need at least 2 cells");
  tm.validate();
  const int n = n_cells;
  FreshVars fv;
  Formula f;
  auto gamma = gamma_symbols(tm);
  auto tapes = tape_symbols(tm);
  auto heads = head_symbols(tm, false);
  auto unit = mk_var("unit");

  f.initials.push_back(unit);
  f.initials.push_back(cell_var("cell", 0, Cell{true, tm.initial, "$"}));
  for (int i = 1; i < n; ++i)
    f.initials.push_back(cell_var("cell", i, Cell{false, "", tm.blank()}));

  auto& out = f.clauses;
  for (int i = 0; i < n; ++i)
    for (const auto& z : gamma)
      for (const auto& z2 : gamma)
        if (!(z == z2)) push(out, {cell_var("cell", i, z), cell_var("cell", i, z2)}, mk_false());
  // units are exactly the punctual intervals
  push(out, {unit}, mk_box(Rel::E, mk_false()));
  push(out, {mk_box(Rel::E, mk_false())}, unit);
  // head cells force a next point
  for (int i = 0; i < n; ++i)
    for (const auto& h : heads)
      push(out, {cell_var("cell", i, h), mk_box(Rel::Bbar, mk_false())}, mk_false());

  using K = TuringMachine::Action::Kind;
  auto copy_clause = [&](int i, const Cell& from, const Cell& to) {
    push(out, {mk_box(Rel::B, cell_var("cell", i, from))},
         mk_box(Rel::E, cell_var("cell", i, to)));
  };
  for (const auto& h : heads) {
    const auto& act = tm.step(h.state, h.symbol);
    auto plain = Cell{false, "", h.symbol};
    auto diag_step = [&](int i, const Cell& a, int j, const Cell& b, const Cell& res) {
      auto cls = binary_implication_diag(cell_var("cell", i, a), cell_var("cell", j, b),
                                         cell_var("cell", j, res), fv);
      (void)i;
      for (auto& c : cls) out.push_back(std::move(c));
    };
    if (act.kind == K::Write) {
      auto written = Cell{true, act.state, act.symbol};
      for (int i = 0; i < n; ++i) copy_clause(i, h, written);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          for (const auto& z : tapes) diag_step(i, h, j, z, z);
        }
    } else if (act.kind == K::MoveRight) {
      for (int i = 0; i + 1 < n; ++i) copy_clause(i, h, plain);
      for (int i = 0; i + 1 < n; ++i)
        for (const auto& z : tapes)
          diag_step(i, h, i + 1, z, Cell{true, act.state, z.symbol});
      for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (j == i || j == i + 1) continue;
          for (const auto& z : tapes) diag_step(i, h, j, z, z);
        }
    } else {
      for (int i = 1; i < n; ++i) copy_clause(i, h, plain);
      for (int i = 1; i < n; ++i)
        for (const auto& z : tapes)
          diag_step(i, h, i - 1, z, Cell{true, act.state, z.symbol});
      for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          if (j == i || j == i - 1) continue;
          for (const auto& z : tapes) diag_step(i, h, j, z, z);
        }
    }
  }
  if (!o.fin)
    for (int i = 0; i < n; ++i)
      for (const auto& s : tape_symbols(tm))
        push(out, {cell_var("cell", i, Cell{true, tm.halt, s.symbol})}, mk_false());
  return f;
}

// ---------------------------------------------------------------------------
// Diamond-Horn encodings (grid enumeration)

namespace {

// phi_grid: properties (a.1)-(a.5) of the octant enumeration, parameterized
// over the successor gadget so that the chessboard variant can reuse it.
struct GridVars {
  ExprPtr unit, diag, diagb, now, up, upu, upr, upp;
};

void grid_properties(std::vector<Clause>& out, const GridVars& v,
                     const std::function<void(bool, const ExprPtr&, const ExprPtr&)>& succ) {
  succ(false /*up*/, v.now, v.up);
  // (a.2)
  succ(false, v.up, v.upu);
  push(out, {v.unit, v.diag},
       mk_box(Rel::Bbar, mk_impl({v.upu}, mk_box(Rel::E, mk_impl({v.unit}, v.diag)))));
  // (a.3)
  push(out, {v.up}, mk_box(Rel::E, mk_impl({v.unit}, v.diagb)));
  push(out, {v.diag, v.diagb}, mk_false());
  // (a.4)
  push(out, {v.unit, v.diagb},
       mk_box(Rel::Bbar, mk_impl({v.upu}, mk_box(Rel::E, mk_impl({v.upr}, v.up)))));
  // (a.5)
  succ(true /*right*/, v.upu, v.upr);
  succ(false, v.upr, v.upp);
  push(out, {v.unit, v.diag},
       mk_box(Rel::Bbar,
              mk_impl({v.upu},
                      mk_box(Rel::E, mk_impl({v.upr},
                                             mk_box(Rel::Bbar, mk_impl({v.upp}, v.up)))))));
}

void tm_grid_steps(std::vector<Clause>& out, const TuringMachine& tm, const ExprPtr& up,
                   const ExprPtr& unit) {
  for (const auto& t : w_set(tm)) {
    auto result = gamma_var(tau(tm, t));
    push(out,
         {gamma_var(t[1]), mk_dia(Rel::A, gamma_var(t[2])), mk_dia(Rel::Abar, gamma_var(t[0]))},
         mk_box(Rel::Bbar, mk_impl({up}, mk_box(Rel::E, mk_impl({unit}, result)))));
  }
}

}  // namespace

Formula gen_diamond_horn(const TuringMachine& tm, const GeneratorOptions& o) {
  tm.validate();
  Formula f;
  auto& out = f.clauses;
  GridVars v{mk_var("unit"), mk_var("diag"),  mk_var("diagb"), mk_var("now"),
             mk_var("up"),   mk_var("upu"),   mk_var("upr"),   mk_var("upp")};
  FinCtx fc{o.fin, mk_var("end")};

  // phi_enum: a unique unit chain
  f.initials.push_back(v.unit);
  f.initials.push_back(v.diag);
  f.initials.push_back(v.now);
  push_generating(out, fc, {v.unit}, mk_dia(Rel::A, v.unit));
  for (Rel r : {Rel::E, Rel::Bbar, Rel::D, Rel::O})
    push(out, {v.unit, mk_dia(r, v.unit)}, mk_false());
  // units never nest (diamond form of the no-unit-inside-unit constraint)
  push(out, {v.unit, mk_dia(Rel::Dbar, v.unit)}, mk_false());

  auto succ = [&](bool right, const ExprPtr& l1, const ExprPtr& l2) {
    grid_succ(out, fc, !right, l1, l2, v.unit);
  };
  grid_properties(out, v, succ);

  tm_grid_common(out, tm, v.unit, v.diag);
  f.initials.push_back(mk_dia(Rel::A, gamma_var(Cell{true, tm.initial, "$"})));
  tm_grid_steps(out, tm, v.up, v.unit);
  if (o.fin)
    end_surgery(out, tm, fc.end, v.unit);
  else
    nonhalting_clauses(out, tm, gamma_var);
  return f;
}

Formula gen_diamond_horn_refl(const TuringMachine& tm, const GeneratorOptions& o) {
  tm.validate();
  Formula f;
  auto& out = f.clauses;
  FreshVars fv;
  GridVars v{mk_var("unit"), mk_var("diag"),  mk_var("diagb"), mk_var("now"),
             mk_var("up"),   mk_var("upu"),   mk_var("upr"),   mk_var("upp")};
  auto htick = mk_var("htick"), htickb = mk_var("htickb");
  auto vtick = mk_var("vtick"), vtickb = mk_var("vtickb");
  auto next = mk_var("next");
  FinCtx fc{o.fin, mk_var("end")};
  FinCtx nofin;  // inner successor squares keep their generators

  // Chessboard
  cover(out, fc, true, htick, htickb, fv);
  cover(out, fc, false, vtick, vtickb, fv);

  auto do_fill = [&](const ExprPtr& p) { fill(out, nofin, p, htick, htickb, vtick, vtickb, fv); };
  do_fill(v.unit);
  do_fill(next);

  // unique unit-square sequence
  f.initials.push_back(v.unit);
  f.initials.push_back(v.diag);
  f.initials.push_back(v.now);
  succ_sq(out, fc, true, v.unit, next, htick, htickb, fv);
  succ_sq(out, fc, false, next, v.unit, vtick, vtickb, fv);

  auto succ = [&](bool right, const ExprPtr& l1, const ExprPtr& l2) {
    succ_sq(out, nofin, right, l1, l2, right ? htick : vtick, right ? htickb : vtickb, fv);
  };
  grid_properties(out, v, succ);
  for (const auto& p : {v.now, v.diag, v.diagb, v.up, v.upu, v.upr, v.upp}) do_fill(p);

  tm_grid_common(out, tm, v.unit, v.diag);
  f.initials.push_back(mk_dia(Rel::A, gamma_var(Cell{true, tm.initial, "$"})));
  tm_grid_steps(out, tm, v.up, v.unit);
  for (const auto& x : gamma_symbols(tm)) do_fill(gamma_var(x));
  if (o.fin)
    end_surgery(out, tm, fc.end, v.unit);
  else
    nonhalting_clauses(out, tm, gamma_var);
  return f;
}

// ---------------------------------------------------------------------------
// Core encoding over the irreflexive semantics

Formula gen_core_irreflexive(const TuringMachine& tm, const GeneratorOptions& o) {
  return gen_core_irreflexive_traced(tm, o, nullptr);
}

Formula gen_core_irreflexive_traced(const TuringMachine& tm, const GeneratorOptions& o,
                                    std::vector<BimpTrace>* trace) {
  tm.validate();
  Formula f;
  auto& out = f.clauses;
  FreshVars fv;
  auto unit = mk_var("unit"), diag = mk_var("diag"), now = mk_var("now");
  auto up = mk_var("up"), wall = mk_var("wall"), line = mk_var("line");
  auto endv = mk_var("end");

  // phi_enum
  f.initials.push_back(unit);
  if (o.fin) {
    for (auto& c : binary_implication_h(mk_dia(Rel::L, endv), unit, mk_dia(Rel::A, unit), fv))
      out.push_back(std::move(c));
  } else {
    push(out, {unit}, mk_dia(Rel::A, unit));
  }
  for (Rel r : {Rel::E, Rel::Bbar, Rel::D, Rel::O})
    push(out, {unit, mk_dia(r, unit)}, mk_false());
  push(out, {unit, mk_box(Rel::D, unit)}, mk_false());

  // up-pointer injectivity
  push(out, {up, mk_dia(Rel::E, up)}, mk_false());
  push(out, {up, mk_dia(Rel::Bbar, up)}, mk_false());
  // (b.1)
  f.initials.push_back(now);
  f.initials.push_back(mk_dia(Rel::A, line));
  push(out, {up, mk_dia(Rel::D, now)}, mk_false());
  // (b.2)
  push(out, {line}, mk_dia(Rel::A, line));
  // (b.3)
  push(out, {wall}, unit);
  push(out, {diag}, unit);
  push(out, {line}, mk_dia(Rel::E, diag));
  push(out, {line}, mk_dia(Rel::B, wall));
  // (b.4)
  push(out, {unit}, mk_dia(Rel::Bbar, up));
  push(out, {up}, mk_dia(Rel::E, unit));
  push(out, {up}, mk_dia(Rel::B, unit));
  push(out, {up, mk_dia(Rel::Bbar, line)}, mk_false());
  push(out, {up, mk_dia(Rel::D, line)}, mk_false());
  // (b.5)
  push(out, {up, mk_dia(Rel::D, up)}, mk_false());
  // (b.6)
  push(out, {wall}, mk_dia(Rel::Ebar, up));
  // (b.7)
  for (auto& c : binary_implication_h(mk_dia(Rel::Dbar, line), unit,
                                      mk_dia(Rel::A, mk_dia(Rel::Abar, up)), fv, trace))
    out.push_back(std::move(c));

  // TM steps through pair and triple variables
  tm_grid_common(out, tm, unit, diag);
  f.initials.push_back(mk_dia(Rel::A, gamma_var(Cell{true, tm.initial, "$"})));
  auto gamma = gamma_symbols(tm);
  auto pair_var = [&](const Cell& y, const Cell& z, bool bar) {
    return mk_var(std::string(bar ? "p2b_" : "p2_") + cell_token(y) + "__" + cell_token(z));
  };
  auto triple_var = [&](const Triple& t, bool bar) {
    return mk_var(std::string(bar ? "p3b_" : "p3_") + cell_token(t[0]) + "__" +
                  cell_token(t[1]) + "__" + cell_token(t[2]));
  };
  for (const auto& y : gamma)
    for (const auto& z : gamma) {
      for (auto& c : binary_implication_v(mk_dia(Rel::Abar, gamma_var(y)), gamma_var(z),
                                          pair_var(y, z, true), fv, trace))
        out.push_back(std::move(c));
      push(out, {pair_var(y, z, true)}, mk_dia(Rel::Abar, pair_var(y, z, false)));
      push(out, {pair_var(y, z, false)}, unit);
    }
  for (const auto& t : w_set(tm)) {
    for (auto& c : binary_implication_h(mk_dia(Rel::A, pair_var(t[1], t[2], false)),
                                        gamma_var(t[0]), triple_var(t, true), fv, trace))
      out.push_back(std::move(c));
    push(out, {triple_var(t, true)}, mk_dia(Rel::A, triple_var(t, false)));
    push(out, {triple_var(t, false)}, up);
    push(out, {triple_var(t, false)}, mk_dia(Rel::E, gamma_var(tau(tm, t))));
  }
  if (o.fin) {
    push(out, {endv}, unit);
    for (const auto& x : gamma) {
      if (x.head && x.state == tm.halt) continue;
      push(out, {endv, gamma_var(x)}, mk_false());
    }
  } else {
    nonhalting_clauses(out, tm, gamma_var);
  }
  return f;
}

// ---------------------------------------------------------------------------
// Box-Horn encoding over discrete orders

Formula gen_box_horn_discrete(const TuringMachine& tm, const GeneratorOptions& o) {
  tm.validate();
  Formula f;
  auto& out = f.clauses;
  FreshVars fv;
  auto unit = mk_var("unit"), init = mk_var("init"), wall = mk_var("wall");
  auto diag = mk_var("diag"), firstm = mk_var("firstm"), mirrorp = mk_var("mirror");
  auto lastm = mk_var("lastm"), lastup = mk_var("lastup"), up = mk_var("up");
  auto gridp = mk_var("gridp"), gridc = mk_var("gridc");

  // phi_enum: units are the immediate-successor intervals
  push(out, {unit, mk_box(Rel::E, mk_false())}, mk_false());
  push(out, {unit}, mk_box(Rel::E, mk_box(Rel::B, mk_false())));
  push(out, {mk_dia(Rel::E, mk_box(Rel::E, mk_false())), mk_box(Rel::E, mk_box(Rel::B, mk_false()))},
       unit);

  // phi_grid: mirror and up pointers
  f.initials.push_back(init);
  for (auto& c : nw_next({init}, lastup, fv)) out.push_back(std::move(c));
  push(out, {init}, unit);
  push(out, {init}, wall);
  push(out, {unit, mk_dia(Rel::Ebar, lastup)}, diag);
  push(out, {diag}, mk_box(Rel::A, mk_impl({unit}, firstm)));
  for (auto& c : nw_next({firstm}, mirrorp, fv)) out.push_back(std::move(c));
  for (auto& c : nw_next({wall}, up, fv)) out.push_back(std::move(c));
  push(out, {unit, mk_dia(Rel::Ebar, up)}, gridp);
  for (auto& c : nw_next({mirrorp, mk_dia(Rel::B, gridp)}, mirrorp, fv))
    out.push_back(std::move(c));
  push(out, {mirrorp, mk_dia(Rel::B, wall)}, lastm);
  push(out, {unit, mk_dia(Rel::Ebar, mirrorp)}, gridc);
  push(out, {unit, mk_dia(Rel::Ebar, lastm)}, wall);
  for (auto& c : nw_next({up, mk_dia(Rel::B, gridc)}, up, fv)) out.push_back(std::move(c));
  push(out, {up, mk_dia(Rel::B, firstm)}, lastup);

  // TM constraints
  auto gamma = gamma_symbols(tm);
  for (const auto& x : gamma) {
    if (x.head && x.state == tm.halt) continue;
    push(out, {unit, gamma_var(x), mk_box(Rel::Bbar, mk_false())}, mk_false());
  }
  for (const auto& x : gamma) push(out, {gamma_var(x)}, unit);
  for (const auto& x : gamma)
    for (const auto& y : gamma)
      if (!(x == y)) push(out, {gamma_var(x), gamma_var(y)}, mk_false());
  push(out, {init}, gamma_var(Cell{true, tm.initial, "$"}));
  push(out, {diag}, gamma_var(Cell{false, "", tm.blank()}));
  push(out, {firstm}, gamma_var(Cell{false, "", "$"}));
  for (const auto& t : w_set(tm)) {
    auto result = gamma_var(tau(tm, t));
    push(out,
         {gridp, gamma_var(t[1]), mk_dia(Rel::A, gamma_var(t[2])),
          mk_dia(Rel::Abar, gamma_var(t[0]))},
         mk_box(Rel::Bbar, mk_impl({mirrorp}, mk_box(Rel::E, mk_impl({unit}, result)))));
    if (!t[0].head && t[0].symbol == tm.blank())
      push(out, {wall, gamma_var(t[1]), mk_dia(Rel::A, gamma_var(t[2]))},
           mk_box(Rel::Bbar, mk_impl({mirrorp}, mk_box(Rel::E, mk_impl({unit}, result)))));
  }
  for (const auto& x : gamma)
    push(out, {gridc, mk_dia(Rel::Bbar, up), gamma_var(x)},
         mk_box(Rel::Bbar, mk_impl({up}, mk_box(Rel::E, mk_impl({unit}, gamma_var(x))))));
  if (!o.fin) nonhalting_clauses(out, tm, gamma_var);
  return f;
}

// ---------------------------------------------------------------------------
// Soundness models

namespace {

void place(FiniteModel& m, const ExprPtr& var, int x, int y) {
  m.valuation[var->var].insert(Interval{x, y});
}

// Column-style placement of the fresh variables of one horizontal binary
// implication instance, following the construction in the proof. `ext` is
// computed over the base valuation; trick arguments never mention fresh
// variables, so later placements cannot invalidate it.
void place_bimp(FiniteModel& m, const BimpTrace& t, LiteralExtensions& ext) {
  int top = m.frame.size - 1;
  std::vector<bool> s1(m.frame.size, false), s2(m.frame.size, false);
  for (const auto& iv : m.frame.intervals()) {
    if (ext.holds(t.l1, iv)) s1[iv.end] = true;
    if (ext.holds(t.l2, iv)) s2[iv.end] = true;
  }
  auto m1 = mk_var(t.m1), m2 = mk_var(t.m2), mm = mk_var(t.m);
  for (int y = 0; y <= top; ++y) {
    if (s1[y] && s2[y]) {
      if (y + 1 > top) continue;
      place(m, m1, y, y + 1);
      place(m, m2, y, y + 1);
      for (int w = y; w <= top; ++w) place(m, mm, y, w);
    } else if (s1[y]) {
      if (y + 2 > top) continue;
      place(m, m1, y, y + 2);
      for (int w = y + 2; w <= top; ++w) place(m, mm, y, w);
    } else if (s2[y]) {
      if (y + 1 > top) continue;
      place(m, m2, y, y + 1);
      place(m, mm, y, y);
    }
  }
}

// Row-style placement for one vertical binary implication instance; the
// mirror image of place_bimp.
void place_bimp_v(FiniteModel& m, const BimpTrace& t, LiteralExtensions& ext) {
  std::vector<bool> s1(m.frame.size, false), s2(m.frame.size, false);
  for (const auto& iv : m.frame.intervals()) {
    if (ext.holds(t.l1, iv)) s1[iv.start] = true;
    if (ext.holds(t.l2, iv)) s2[iv.start] = true;
  }
  auto m1 = mk_var(t.m1), m2 = mk_var(t.m2), mm = mk_var(t.m);
  for (int x = 0; x < m.frame.size; ++x) {
    if (s1[x] && s2[x]) {
      if (x - 1 < 0) continue;
      place(m, m1, x - 1, x);
      place(m, m2, x - 1, x);
      for (int w = 0; w <= x; ++w) place(m, mm, w, x);
    } else if (s1[x]) {
      if (x - 2 < 0) continue;
      place(m, m1, x - 2, x);
      for (int w = 0; w <= x - 2; ++w) place(m, mm, w, x);
    } else if (s2[x]) {
      if (x - 1 < 0) continue;
      place(m, m2, x - 1, x);
      place(m, mm, x, x);
    }
  }
}

// Least completion of the desugaring- and gadget-introduced fresh
// variables: heads that are underscore variables, possibly under a single
// box, are closed under forward chaining. Literal extensions are rebuilt
// once per sweep over the growing valuation.
void complete_aux(FiniteModel& m, const Formula& f) {
  auto fresh_head = [](const syntax::ExprPtr& e) {
    if (e->kind == Kind::Var && e->var[0] == '_') return true;
    return e->kind == Kind::Box && e->arg->kind == Kind::Var && e->arg->var[0] == '_';
  };
  bool changed = true;
  while (changed) {
    changed = false;
    LiteralExtensions ext(m);
    for (const auto& c : f.clauses) {
      if (!fresh_head(c.head)) continue;
      for (const auto& iv : m.frame.intervals()) {
        bool body = true;
        for (const auto& b : c.body)
          if (!ext.holds(b, iv)) {
            body = false;
            break;
          }
        if (!body) continue;
        if (c.head->kind == Kind::Var) {
          if (!m.holds(c.head->var, iv)) {
            m.valuation[c.head->var].insert(iv);
            changed = true;
          }
        } else {
          for (const auto& succ : semantics::successors(m.frame, iv, c.head->rel))
            if (!m.holds(c.head->arg->var, succ)) {
              m.valuation[c.head->arg->var].insert(succ);
              changed = true;
            }
        }
      }
    }
  }
}

SoundnessModel build_pspace_model(const TuringMachine& tm, int window) {
  if (halts_within(tm, window)) throw TmError("machine halts inside the requested window");
  int n_cells = window + 4;
  // A few configurations beyond the window keep the active region of the
  // chain fully populated.
  auto run = simulate(tm, window + 3, ConfigConvention::Fixed, n_cells);

  std::vector<BimpTrace> trace;
  GeneratorOptions o;
  Formula surface = gen_pspace_core_traced(tm, n_cells, o, &trace);
  Formula f = syntax::desugar(surface);

  SoundnessModel sm;
  sm.formula = f;
  int size = 2 * window + 8;
  sm.model.frame = semantics::FiniteFrame(size, semantics::Semantics{
                                                    semantics::Flavor::Irreflexive, false});
  sm.seed = Interval{0, 2};
  auto& m = sm.model;
  for (int n = 0; 2 * n + 2 < size && n < static_cast<int>(run.size()); ++n) {
    place(m, mk_var("unit"), 2 * n, 2 * n + 2);
    const auto& conf = run[n];
    for (int i = 0; i < n_cells; ++i) {
      const Cell& z = conf[i];
      for (int x = 0; x <= 2 * n + 2; ++x)
        place(m, cell_var("cell", i, z), x, 2 * n + 2);
      int barend = z.head ? 2 * n + 4 : 2 * n + 5;
      if (barend < size) place(m, cell_var("cellb", i, z), 2 * n + 2, barend);
    }
  }
  LiteralExtensions ext(m);
  for (const auto& t : trace) place_bimp(m, t, ext);
  complete_aux(m, f);
  return sm;
}

SoundnessModel build_diamond_model(const TuringMachine& tm, int window) {
  // Enough configurations to cover every grid row inside the window.
  int max_row = 1;
  while (grid_index(GridPoint{0, max_row + 1}) <= window) ++max_row;
  auto run = simulate(tm, max_row + 1, ConfigConvention::Growing);
  if (static_cast<int>(run.size()) < max_row)
    throw TmError("machine halts inside the requested window");

  GeneratorOptions o;
  Formula f = syntax::desugar(gen_diamond_horn(tm, o));

  SoundnessModel sm;
  sm.formula = f;
  int size = window + 1;
  sm.model.frame = semantics::FiniteFrame(size, semantics::Semantics{
                                                    semantics::Flavor::Irreflexive, false});
  sm.seed = Interval{0, 1};
  auto& m = sm.model;
  auto in_chain = [&](int p) { return p >= 0 && p < size; };
  for (int k = 0; k < window; ++k) {
    place(m, mk_var("unit"), k, k + 1);
    place(m, mk_var(on_diagonal(k) ? "diag" : "diagb"), k, k + 1);
    GridPoint p = grid_point(k);
    if (p.row >= 1) {
      const auto& conf = run[p.row - 1];
      if (p.col < static_cast<int>(conf.size()))
        place(m, gamma_var(conf[p.col]), k, k + 1);
    } else {
      place(m, gamma_var(Cell{false, "", tm.blank()}), k, k + 1);
    }
  }
  place(m, mk_var("now"), 0, 1);
  for (int n = 0; n < window; ++n) {
    int k = up_neighbour(n);
    if (in_chain(n) && in_chain(k + 1)) place(m, mk_var("up"), n, k + 1);
    if (in_chain(k + 2)) place(m, mk_var("upu"), n, k + 2);
    if (in_chain(n + 1) && in_chain(k + 2)) place(m, mk_var("upr"), n + 1, k + 2);
    if (in_chain(n + 1) && in_chain(k + 3)) place(m, mk_var("upp"), n + 1, k + 3);
  }
  complete_aux(m, f);
  return sm;
}

// The core encoding lays lines, walls and pointers over the unit chain:
// line i spans from the start of its first unit to the end of its last,
// walls are line-start units, and every pointer runs from the start of its
// source unit to the end of its target unit.
SoundnessModel build_core_irrefl_model(const TuringMachine& tm, int window) {
  // Everything the active region can see must be placed, so the chain
  // extends to the end of the second line beyond the window's row.
  int row_w = grid_point(window).row;
  int horizon = grid_index(GridPoint{row_w + 2, row_w + 2}) + 2;
  auto run = simulate(tm, row_w + 4, ConfigConvention::Growing);
  if (static_cast<int>(run.size()) < row_w + 3)
    throw TmError("machine halts inside the requested window");

  std::vector<BimpTrace> trace;
  GeneratorOptions o;
  Formula f = syntax::desugar(gen_core_irreflexive_traced(tm, o, &trace));

  SoundnessModel sm;
  sm.formula = f;
  const int lm = 3;  // rows below the first unit stay out of the active region
  // Unit points are spaced two apart: each unit needs a non-unit interior,
  // otherwise [D]unit holds vacuously and the nesting constraint misfires.
  int size = lm + 2 * horizon + 2;
  sm.model.frame = semantics::FiniteFrame(size, semantics::Semantics{
                                                    semantics::Flavor::Irreflexive, false});
  auto u = [&](int k) { return lm + 2 * k; };
  sm.seed = Interval{u(0), u(1)};
  auto& m = sm.model;
  auto in_chain = [&](int p) { return p >= 0 && p < size; };

  auto content = [&](int pt) -> Cell {
    GridPoint p = grid_point(pt);
    if (p.row == 0) return Cell{false, "", tm.blank()};
    return run[p.row - 1][p.col];
  };

  for (int k = 0; in_chain(u(k + 1)); ++k) {
    place(m, mk_var("unit"), u(k), u(k + 1));
    if (on_diagonal(k)) place(m, mk_var("diag"), u(k), u(k + 1));
    place(m, gamma_var(content(k)), u(k), u(k + 1));
  }
  place(m, mk_var("now"), u(0), u(1));
  // Walls and line spans.
  for (int row = 1;; ++row) {
    int first = grid_index(GridPoint{0, row});
    int last = grid_index(GridPoint{row, row});
    if (!in_chain(u(first + 1))) break;
    place(m, mk_var("wall"), u(first), u(first + 1));
    if (in_chain(u(last + 1))) place(m, mk_var("line"), u(first), u(last + 1));
  }
  // Up pointers.
  for (int n = 0; in_chain(u(n + 1)); ++n) {
    int k = up_neighbour(n);
    if (in_chain(u(k + 1))) place(m, mk_var("up"), u(n), u(k + 1));
  }
  // Pair and triple variables of the transition encoding.
  auto pair_name = [&](const Cell& y, const Cell& z, bool bar) {
    return std::string(bar ? "p2b_" : "p2_") + cell_token(y) + "__" + cell_token(z);
  };
  auto triple_name = [&](const Triple& t, bool bar) {
    return std::string(bar ? "p3b_" : "p3_") + cell_token(t[0]) + "__" + cell_token(t[1]) +
           "__" + cell_token(t[2]);
  };
  for (int i = 1; in_chain(u(i + 1)); ++i) {
    Cell y = content(i - 1), z = content(i);
    place(m, mk_var(pair_name(y, z, false)), u(i - 1), u(i));
    for (int w = u(i); w < size; ++w) place(m, mk_var(pair_name(y, z, true)), u(i), w);
  }
  for (int i = 2; in_chain(u(i + 1)); ++i) {
    Triple t{content(i - 2), content(i - 1), content(i)};
    if (!in_w_set(tm, t)) continue;
    int k = up_neighbour(i - 1);
    if (in_chain(u(k + 1))) place(m, mk_var(triple_name(t, false)), u(i - 1), u(k + 1));
    for (int w = 0; w <= u(i - 1); ++w) place(m, mk_var(triple_name(t, true)), w, u(i - 1));
  }
  LiteralExtensions ext(m);
  for (const auto& t : trace) {
    if (t.vertical)
      place_bimp_v(m, t, ext);
    else
      place_bimp(m, t, ext);
  }
  complete_aux(m, f);
  return sm;
}

// The box encoding's layout over the consecutive-point unit chain: each
// line's proper block is preceded by its first cell on the wall unit, which
// doubles as the last unit of the reversed copy block of that line; a
// marker unit carrying the left end separates a line's proper block from
// the next line's copies. Mirror pointers run from a proper location to the
// end of its copy one line up, up pointers from a copy back to its proper
// location.
SoundnessModel build_box_horn_model(const TuringMachine& tm, int window) {
  int rows = grid_point(window).row + 2;
  auto run = simulate(tm, rows + 2, ConfigConvention::Growing);
  if (static_cast<int>(run.size()) < rows + 1)
    throw TmError("machine halts inside the requested window");

  GeneratorOptions o;
  Formula f = syntax::desugar(gen_box_horn_discrete(tm, o));

  SoundnessModel sm;
  sm.formula = f;
  const int lm = 2;
  // block starts: s(1) = lm, s(i+1) = s(i) + 2i + 2
  std::vector<int> s{0, lm};
  for (int i = 1; i <= rows + 1; ++i) s.push_back(s[i] + 2 * i + 2);
  int size = s[rows + 1] + 2;
  sm.model.frame = semantics::FiniteFrame(size, semantics::Semantics{
                                                    semantics::Flavor::Irreflexive, false});
  sm.seed = Interval{lm, lm + 1};
  auto& m = sm.model;
  auto in_chain = [&](int p) { return p >= 0 && p < size; };
  auto unit_at = [&](const char* var, int k) {
    if (in_chain(k + 1)) place(m, mk_var(var), k, k + 1);
  };
  auto cell = [&](int row, int col) { return run[row - 1][col]; };

  for (int k = 0; k + 1 < size; ++k) place(m, mk_var("unit"), k, k + 1);
  unit_at("init", s[1]);
  for (int i = 1; i <= rows && s[i] < size; ++i) {
    unit_at("wall", s[i]);
    if (in_chain(s[i] + 1)) place(m, gamma_var(cell(i, 0)), s[i], s[i] + 1);
    for (int c = 1; c <= i; ++c) {
      unit_at("gridp", s[i] + c);
      if (in_chain(s[i] + c + 1)) place(m, gamma_var(cell(i, c)), s[i] + c, s[i] + c + 1);
    }
    unit_at("diag", s[i] + i);
    unit_at("firstm", s[i] + i + 1);
    if (in_chain(s[i] + i + 2))
      place(m, gamma_var(Cell{false, "", "$"}), s[i] + i + 1, s[i] + i + 2);
    for (int j = 1; j <= i + 1; ++j) {
      int k = s[i] + i + 1 + j;
      unit_at("gridc", k);
      if (j <= i && in_chain(k + 1)) place(m, gamma_var(cell(i + 1, i + 1 - j)), k, k + 1);
    }
    // mirror pointers of line i (c = 0 is the wall and ends the sweep)
    for (int c = i; c >= 0; --c) {
      int from = s[i] + c;
      int to = s[i] + i + 1 + (i + 1 - c) + 1;
      if (!in_chain(to)) continue;
      place(m, mk_var("mirror"), from, to);
      if (c == 0) place(m, mk_var("lastm"), from, to);
    }
    // up pointers into line i (from the previous block's copies)
    if (i >= 2)
      for (int c = 1; c < i; ++c) {
        int from = s[i - 1] + 2 * i - c;
        int to = s[i] + c + 1;
        if (in_chain(to)) place(m, mk_var("up"), from, to);
      }
    int up_from = i == 1 ? s[1] - 1 : s[i - 1] + i;
    int up_to = s[i] + i + 1;
    if (in_chain(up_from) && in_chain(up_to)) {
      place(m, mk_var("up"), up_from, up_to);
      place(m, mk_var("lastup"), up_from, up_to);
    }
  }
  complete_aux(m, f);
  return sm;
}

}  // namespace

SoundnessModel build_soundness_model(const TuringMachine& tm, Construction c,
                                     int window_units) {
  if (window_units <= 0) throw TmError("window must contain at least one unit");
  switch (c) {
    case Construction::PspaceCore:
      return build_pspace_model(tm, window_units);
    case Construction::DiamondHorn:
      return build_diamond_model(tm, window_units);
    case Construction::CoreIrrefl:
      return build_core_irrefl_model(tm, window_units);
    case Construction::BoxHorn:
      return build_box_horn_model(tm, window_units);
  }
  throw TmError("unknown construction");
}

}  // namespace hornhs::reductions

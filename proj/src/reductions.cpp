#include "hornhs/reductions.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "hornhs/closure.hpp"

namespace hornhs::reductions {

using syntax::ExprPtr;
using syntax::Kind;
using syntax::mk_and;
using syntax::mk_box;
using syntax::mk_dia;
using syntax::mk_false;
using syntax::mk_impl;
using syntax::mk_not;
using syntax::mk_true;
using syntax::mk_var;

// ---------------------------------------------------------------------------
// Turing machines

const TuringMachine::Action& TuringMachine::step(const std::string& state,
                                                 const std::string& symbol) const {
  auto it = delta.find({state, symbol});
  if (it == delta.end())
    throw TmError("missing transition for (" + state + ", " + symbol + ")");
  return it->second;
}

void TuringMachine::validate() const {
  if (alphabet.empty()) throw TmError("empty alphabet");
  auto known_state = [&](const std::string& s) {
    return std::find(states.begin(), states.end(), s) != states.end();
  };
  auto known_symbol = [&](const std::string& s) {
    return std::find(alphabet.begin(), alphabet.end(), s) != alphabet.end();
  };
  if (!known_state(initial) || !known_state(halt))
    throw TmError("initial/halt state not in the state list");
  for (const auto& s : alphabet)
    if (s == "L" || s == "R" || s == "$")
      throw TmError("alphabet may not contain L, R or $");
  for (const auto& [key, act] : delta) {
    if (!known_state(key.first) || key.first == halt)
      throw TmError("transition from unknown or halt state " + key.first);
    if (key.second != "$" && !known_symbol(key.second))
      throw TmError("transition on unknown symbol " + key.second);
    if (!known_state(act.state)) throw TmError("transition to unknown state " + act.state);
    if (act.kind == Action::Kind::Write && !known_symbol(act.symbol))
      throw TmError("write of unknown symbol " + act.symbol);
    if (key.second == "$" && act.kind != Action::Kind::MoveRight)
      throw TmError("the machine must move right on the left marker");
  }
  for (const auto& q : states) {
    if (q == halt) continue;
    for (const auto& s : alphabet)
      if (!delta.count({q, s})) throw TmError("delta not total: missing (" + q + ", " + s + ")");
    if (!delta.count({q, "$"})) throw TmError("delta not total: missing (" + q + ", $)");
  }
}

namespace {

void strip(std::string& s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  s.erase(0, i);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

TuringMachine read_tm(const std::string& text) {
  TuringMachine tm;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    strip(line);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw TmError("line " + std::to_string(lineno) + ": expected 'key: value'");
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    strip(key);
    strip(value);
    if (key == "states") {
      tm.states = words(value);
    } else if (key == "initial") {
      tm.initial = value;
    } else if (key == "halt") {
      tm.halt = value;
    } else if (key == "alphabet") {
      tm.alphabet = words(value);
    } else if (key == "delta") {
      auto arrow = value.find("->");
      if (arrow == std::string::npos)
        throw TmError("line " + std::to_string(lineno) + ": expected 'q,s -> q',X'");
      std::string lhs = value.substr(0, arrow);
      std::string rhs = value.substr(arrow + 2);
      strip(lhs);
      strip(rhs);
      auto lc = lhs.find(',');
      auto rc = rhs.find(',');
      if (lc == std::string::npos || rc == std::string::npos)
        throw TmError("line " + std::to_string(lineno) + ": expected 'q,s -> q',X'");
      std::string q = lhs.substr(0, lc), s = lhs.substr(lc + 1);
      std::string q2 = rhs.substr(0, rc), x = rhs.substr(rc + 1);
      strip(q);
      strip(s);
      strip(q2);
      strip(x);
      TuringMachine::Action act;
      act.state = q2;
      if (x == "L" || x == "l") {
        act.kind = TuringMachine::Action::Kind::MoveLeft;
      } else if (x == "R" || x == "r") {
        act.kind = TuringMachine::Action::Kind::MoveRight;
      } else {
        act.kind = TuringMachine::Action::Kind::Write;
        act.symbol = x;
      }
      if (!tm.delta.emplace(std::make_pair(q, s), act).second)
        throw TmError("line " + std::to_string(lineno) + ": duplicate transition");
    } else {
      throw TmError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  tm.validate();
  return tm;
}

std::string cell_token(const Cell& c) {
  auto sym = [](const std::string& s) -> std::string {
    if (s == "$") return "lend";
    if (s == "_") return "blank";
    return s;
  };
  if (c.head) return "h_" + c.state + "_" + sym(c.symbol);
  return sym(c.symbol);
}

std::vector<Configuration> simulate(const TuringMachine& tm, int steps,
                                    ConfigConvention conv, int n_cells) {
  if (steps < 1) throw TmError("simulate requires steps >= 1");
  if (conv == ConfigConvention::Fixed && n_cells < 2)
    throw TmError("fixed-length convention requires at least 2 cells");
  Configuration c;
  c.push_back(Cell{true, tm.initial, "$"});
  if (conv == ConfigConvention::Fixed) {
    for (int i = 1; i < n_cells; ++i) c.push_back(Cell{false, "", tm.blank()});
  } else {
    c.push_back(Cell{false, "", tm.blank()});
  }
  std::vector<Configuration> out{c};
  for (int n = 1; n < steps; ++n) {
    // Halting configuration reached?
    size_t head = 0;
    while (head < c.size() && !c[head].head) ++head;
    if (c[head].state == tm.halt) break;
    const auto& act = tm.step(c[head].state, c[head].symbol);
    if (conv == ConfigConvention::Growing) c.push_back(Cell{false, "", tm.blank()});
    switch (act.kind) {
      case TuringMachine::Action::Kind::Write:
        c[head] = Cell{true, act.state, act.symbol};
        break;
      case TuringMachine::Action::Kind::MoveLeft: {
        if (head == 0) throw TmError("head fell off the left end");
        c[head] = Cell{false, "", c[head].symbol};
        c[head - 1] = Cell{true, act.state, c[head - 1].symbol};
        break;
      }
      case TuringMachine::Action::Kind::MoveRight: {
        if (head + 1 >= c.size())
          throw TmError("machine visited the last cell of a fixed-length configuration");
        c[head] = Cell{false, "", c[head].symbol};
        c[head + 1] = Cell{true, act.state, c[head + 1].symbol};
        break;
      }
    }
    out.push_back(c);
  }
  return out;
}

bool halts_within(const TuringMachine& tm, int steps) {
  auto run = simulate(tm, steps, ConfigConvention::Growing);
  for (const auto& c : run)
    for (const auto& cell : c)
      if (cell.head && cell.state == tm.halt) return true;
  return false;
}

std::vector<Cell> gamma_symbols(const TuringMachine& tm) {
  std::vector<Cell> out;
  for (const auto& s : tm.alphabet) out.push_back(Cell{false, "", s});
  out.push_back(Cell{false, "", "$"});
  for (const auto& q : tm.states) {
    for (const auto& s : tm.alphabet) out.push_back(Cell{true, q, s});
    out.push_back(Cell{true, q, "$"});
  }
  return out;
}

// Triples that can occur as three consecutive cells of the linearized
// computation: at most one head (never the halt state), the left marker only
// at a configuration start, and the cell before a wrap always blank.
bool in_w_set(const TuringMachine& tm, const Triple& t) {
  const Cell &x = t[0], &y = t[1], &z = t[2];
  int heads = 0;
  for (const Cell& c : t)
    if (c.head) {
      if (c.state == tm.halt) return false;
      ++heads;
    }
  if (heads > 1) return false;
  auto blank = [&](const Cell& c) { return !c.head && c.symbol == tm.blank(); };
  bool dx = x.symbol == "$", dy = y.symbol == "$", dz = z.symbol == "$";
  if (!dx && !dy && !dz) return true;
  if (dx && !dy && !dz) return true;
  if (dy && !dx && !dz) return blank(x);
  if (dz && !dx && !dy) return blank(y);
  // A two-cell configuration exists only at the very start.
  if (dx && dz && !dy)
    return x == Cell{true, tm.initial, "$"} && blank(y) && z == Cell{false, "", "$"};
  return false;
}

std::set<Triple> w_set(const TuringMachine& tm) {
  std::set<Triple> out;
  auto gamma = gamma_symbols(tm);
  for (const auto& x : gamma)
    for (const auto& y : gamma)
      for (const auto& z : gamma) {
        Triple t{x, y, z};
        if (in_w_set(tm, t)) out.insert(t);
      }
  return out;
}

Cell tau(const TuringMachine& tm, const Triple& t) {
  if (!in_w_set(tm, t)) throw TmError("triple not in W");
  const Cell &x = t[0], &y = t[1], &z = t[2];
  using K = TuringMachine::Action::Kind;
  if (x.head && x.state != tm.halt) {
    const auto& act = tm.step(x.state, x.symbol);
    if (act.kind == K::MoveRight) return Cell{true, act.state, y.symbol};
  }
  if (z.head && z.state != tm.halt && z.symbol != "$") {
    const auto& act = tm.step(z.state, z.symbol);
    if (act.kind == K::MoveLeft) return Cell{true, act.state, y.symbol};
  }
  if (y.head && y.state != tm.halt) {
    const auto& act = tm.step(y.state, y.symbol);
    if (act.kind == K::Write) return Cell{true, act.state, act.symbol};
    return Cell{false, "", y.symbol};
  }
  return y;
}

// ---------------------------------------------------------------------------
// Gadget tricks

namespace {

Clause clause(std::vector<ExprPtr> body, ExprPtr head) {
  return Clause{std::move(body), std::move(head)};
}

}  // namespace

std::vector<Clause> binary_implication_h(const ExprPtr& l1, const ExprPtr& l2,
                                         const ExprPtr& l, FreshVars& fv,
                                         std::vector<BimpTrace>* trace) {
  auto m1n = fv.next("bimp"), m2n = fv.next("bimp"), mn = fv.next("bimp");
  auto m1 = mk_var(m1n), m2 = mk_var(m2n), m = mk_var(mn);
  if (trace) trace->push_back(BimpTrace{l1, l2, l, m1n, m2n, mn});
  using syntax::Rel;
  return {
      clause({l1}, mk_dia(Rel::A, m1)),
      clause({l2}, mk_dia(Rel::A, m2)),
      clause({m2, mk_dia(Rel::Bbar, m1)}, mk_false()),
      clause({m1}, m),
      clause({m1}, mk_box(Rel::Bbar, m)),
      clause({m2}, mk_box(Rel::B, m)),
      clause({mk_box(Rel::A, m)}, l),
  };
}

std::vector<Clause> binary_implication_v(const ExprPtr& l1, const ExprPtr& l2,
                                         const ExprPtr& l, FreshVars& fv,
                                         std::vector<BimpTrace>* trace) {
  auto m1n = fv.next("bimp"), m2n = fv.next("bimp"), mn = fv.next("bimp");
  auto m1 = mk_var(m1n), m2 = mk_var(m2n), m = mk_var(mn);
  if (trace) trace->push_back(BimpTrace{l1, l2, l, m1n, m2n, mn, true});
  using syntax::Rel;
  return {
      clause({l1}, mk_dia(Rel::Abar, m1)),
      clause({l2}, mk_dia(Rel::Abar, m2)),
      clause({m2, mk_dia(Rel::Ebar, m1)}, mk_false()),
      clause({m1}, m),
      clause({m1}, mk_box(Rel::Ebar, m)),
      clause({m2}, mk_box(Rel::E, m)),
      clause({mk_box(Rel::Abar, m)}, l),
  };
}

std::vector<Clause> binary_implication_diag(const ExprPtr& l1, const ExprPtr& l2,
                                            const ExprPtr& l, FreshVars& fv) {
  auto m = mk_var(fv.next("bimp"));
  using syntax::Rel;
  return {
      clause({l1}, mk_box(Rel::A, m)),
      clause({l2}, mk_box(Rel::A, mk_box(Rel::Ebar, m))),
      clause({mk_box(Rel::A, mk_box(Rel::Abar, m))}, l),
  };
}

std::vector<Clause> nw_next(const std::vector<ExprPtr>& phi, const ExprPtr& l,
                            FreshVars& fv) {
  auto down = mk_var(fv.next("nw")), up = mk_var(fv.next("nw")),
       right = mk_var(fv.next("nw")), left = mk_var(fv.next("nw")),
       star = mk_var(fv.next("nw"));
  using syntax::Rel;
  return {
      clause(phi, down),
      clause(phi, mk_box(Rel::B, down)),
      clause(phi, mk_box(Rel::Bbar, up)),
      clause({up, mk_box(Rel::B, down)}, star),
      clause({star}, right),
      clause({star}, mk_box(Rel::E, right)),
      clause({star}, mk_box(Rel::Ebar, left)),
      clause({left, mk_box(Rel::E, right)}, l),
  };
}

// ---------------------------------------------------------------------------
// Grid enumeration of the north-western octant

GridPoint grid_point(int n) {
  if (n == 0) return GridPoint{0, 0};
  int row = 1;
  while (1 + (row) * (row + 3) / 2 <= n) ++row;  // start(row+1) <= n
  int start = 1 + (row - 1) * (row + 2) / 2;
  return GridPoint{n - start, row};
}

int grid_index(const GridPoint& p) {
  if (p.row == 0) return 0;
  return 1 + (p.row - 1) * (p.row + 2) / 2 + p.col;
}

int up_neighbour(int n) {
  GridPoint p = grid_point(n);
  return grid_index(GridPoint{p.col, p.row + 1});
}

bool on_diagonal(int n) {
  GridPoint p = grid_point(n);
  return p.col == p.row;
}

// ---------------------------------------------------------------------------
// Window checking

LiteralExtensions::LiteralExtensions(const FiniteModel& m) : m_(m) {
  int n = m.frame.interval_count();
  for (auto& s : succ_) s.assign(n, closure::Bitset(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (syntax::Rel r : syntax::all_relations())
        if (semantics::relation_holds(r, m.frame.interval(i), m.frame.interval(j),
                                      m.frame.sem))
          succ_[static_cast<int>(r)][i].set(j);
}

const closure::Bitset& LiteralExtensions::of(const ExprPtr& e) {
  std::string key = syntax::render(e);
  auto it = memo_.find(key);
  if (it != memo_.end()) return it->second;
  int n = m_.frame.interval_count();
  closure::Bitset bs(n);
  switch (e->kind) {
    case Kind::True:
      for (int i = 0; i < n; ++i) bs.set(i);
      break;
    case Kind::False:
      break;
    case Kind::Var: {
      auto vit = m_.valuation.find(e->var);
      if (vit != m_.valuation.end())
        for (const auto& iv : vit->second) bs.set(m_.frame.id_of(iv));
      break;
    }
    case Kind::Dia: {
      const auto& arg = of(e->arg);
      const auto& sc = succ_[static_cast<int>(e->rel)];
      for (int i = 0; i < n; ++i)
        if (sc[i].intersects(arg)) bs.set(i);
      break;
    }
    case Kind::Box: {
      const auto& arg = of(e->arg);
      const auto& sc = succ_[static_cast<int>(e->rel)];
      for (int i = 0; i < n; ++i)
        if (sc[i].subset_of(arg)) bs.set(i);
      break;
    }
    default:
      throw std::logic_error("literal extensions require a desugared formula");
  }
  return memo_.emplace(std::move(key), std::move(bs)).first->second;
}

bool LiteralExtensions::holds(const ExprPtr& literal, const Interval& at) {
  return of(literal).test(m_.frame.id_of(at));
}

WindowReport check_window(const FiniteModel& m, const Formula& f, const Interval& seed,
                          int margin) {
  return check_window(m, f, seed, margin, margin);
}

WindowReport check_window(const FiniteModel& m, const Formula& f, const Interval& seed,
                          int lo_margin, int hi_margin) {
  const auto& frame = m.frame;
  int n = frame.interval_count();
  int top = frame.size - 1;
  LiteralExtensions ext(m);

  WindowReport rep;
  for (const auto& init : f.initials)
    if (!ext.holds(init, seed)) rep.initials_ok = false;

  for (size_t ci = 0; ci < f.clauses.size(); ++ci) {
    const auto& c = f.clauses[ci];
    std::vector<const closure::Bitset*> body;
    for (const auto& b : c.body) body.push_back(&ext.of(b));
    const auto& head = ext.of(c.head);
    for (int w = 0; w < n; ++w) {
      bool fires = true;
      for (auto* b : body)
        if (!b->test(w)) {
          fires = false;
          break;
        }
      const Interval& iv = frame.interval(w);
      bool active = iv.start >= lo_margin && iv.end <= top - hi_margin;
      if (!active) {
        if (fires) ++rep.skipped;
        continue;
      }
      ++rep.instances;
      if (!fires || head.test(w)) {
        ++rep.passed;
      } else {
        rep.failures.push_back(WindowReport::Failure{ci, iv});
      }
    }
  }
  return rep;
}

}  // namespace hornhs::reductions

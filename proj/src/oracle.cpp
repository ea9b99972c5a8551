#include "hornhs/oracle.hpp"

#include <algorithm>

namespace hornhs::oracle {

using semantics::relation_holds;
using syntax::ExprPtr;
using syntax::Kind;
using syntax::Rel;

closure::WorldGraph world_graph(const FiniteFrame& frame) {
  closure::WorldGraph g(frame.interval_count());
  const auto& ivs = frame.intervals();
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      for (Rel r : syntax::all_relations())
        if (relation_holds(r, ivs[i], ivs[j], frame.sem)) g.add_edge(r, i, j);
  return g;
}

bool LabelStore::holds(const ExprPtr& literal, const Interval& at) const {
  std::string key = syntax::render(literal);
  for (size_t i = 0; i < index.literals.size(); ++i)
    if (syntax::render(index.literals[i]) == key)
      return result.facts[i].test(frame->id_of(at));
  return false;
}

LabelStore closure_finite(const syntax::Formula& f, const FiniteFrame& frame,
                          const Interval& seed, std::uint64_t shuffle_seed) {
  if (!frame.contains(seed)) throw std::invalid_argument("seed interval not in frame");
  LabelStore ls;
  ls.index = closure::index_box_horn(f);
  auto g = world_graph(frame);
  ls.result = closure::close(ls.index, g, frame.id_of(seed), {}, shuffle_seed);
  ls.frame = &frame;
  return ls;
}

bool is_seed_satisfiable(const syntax::Formula& f, const FiniteFrame& frame,
                         const Interval& seed) {
  auto index = closure::index_box_horn(f);
  auto g = world_graph(frame);
  return !closure::close(index, g, frame.id_of(seed)).bottom;
}

FiniteModel canonical_model_finite(const syntax::Formula& f, const FiniteFrame& frame,
                                   const Interval& seed) {
  auto index = closure::index_box_horn(f);
  auto g = world_graph(frame);
  auto res = closure::close(index, g, frame.id_of(seed));
  if (res.bottom)
    throw std::invalid_argument("canonical_model_finite on an unsatisfiable input");
  FiniteModel m;
  m.frame = frame;
  for (int id : index.var_ids())
    for (int w = 0; w < g.n; ++w)
      if (res.facts[id].test(w))
        m.valuation[index.literals[id]->var].insert(frame.interval(w));
  return m;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

namespace {

void check_cap(size_t vars, int ints, int cap) {
  if (static_cast<long>(vars) * ints > cap)
    throw EnumerationCapExceeded("enumeration cap exceeded: " + std::to_string(vars) +
                                 " vars x " + std::to_string(ints) + " intervals > " +
                                 std::to_string(cap));
}

}  // namespace

void exhaustive_models(const std::vector<std::string>& vars, const FiniteFrame& frame,
                       const std::function<bool(const FiniteModel&)>& fn, int cap) {
  int ints = frame.interval_count();
  check_cap(vars.size(), ints, cap);
  int bits = static_cast<int>(vars.size()) * ints;
  FiniteModel m;
  m.frame = frame;
  for (std::uint64_t mask = 0; mask < (1ull << bits); ++mask) {
    m.valuation.clear();
    for (size_t v = 0; v < vars.size(); ++v)
      for (int i = 0; i < ints; ++i)
        if ((mask >> (v * ints + i)) & 1) m.valuation[vars[v]].insert(frame.interval(i));
    if (!fn(m)) return;
  }
}

long exhaustive_model_count(const std::vector<std::string>& vars, const FiniteFrame& frame,
                            int cap) {
  check_cap(vars.size(), frame.interval_count(), cap);
  return 1ll << (vars.size() * frame.interval_count());
}

bool exhaustively_satisfiable(const syntax::Formula& f, const FiniteFrame& frame, int cap) {
  std::vector<std::string> vars;
  auto collect = [&](const ExprPtr& e) {
    std::vector<ExprPtr> stack{e};
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      if (x->kind == Kind::Var &&
          std::find(vars.begin(), vars.end(), x->var) == vars.end())
        vars.push_back(x->var);
      if (x->arg) stack.push_back(x->arg);
      for (auto& p : x->parts) stack.push_back(p);
      if (x->head) stack.push_back(x->head);
    }
  };
  for (auto& i : f.initials) collect(i);
  for (auto& c : f.clauses) {
    for (auto& b : c.body) collect(b);
    collect(c.head);
  }
  bool found = false;
  exhaustive_models(
      vars, frame,
      [&](const FiniteModel& m) {
        if (semantics::model_satisfies(m, f)) {
          found = true;
          return false;
        }
        return true;
      },
      cap);
  return found;
}

bool exhaustively_seed_satisfiable(const syntax::Formula& f, const FiniteFrame& frame,
                                   const Interval& seed, int cap) {
  return least_model_exhaustive(f, frame, seed, cap).has_value();
}

std::optional<FiniteModel> least_model_exhaustive(const syntax::Formula& f,
                                                  const FiniteFrame& frame,
                                                  const Interval& seed, int cap) {
  std::vector<std::string> vars;
  auto collect_expr = [&](const ExprPtr& e) {
    std::vector<ExprPtr> stack{e};
    while (!stack.empty()) {
      auto x = stack.back();
      stack.pop_back();
      if (x->kind == Kind::Var &&
          std::find(vars.begin(), vars.end(), x->var) == vars.end())
        vars.push_back(x->var);
      if (x->arg) stack.push_back(x->arg);
      for (auto& p : x->parts) stack.push_back(p);
      if (x->head) stack.push_back(x->head);
    }
  };
  for (auto& i : f.initials) collect_expr(i);
  for (auto& c : f.clauses) {
    for (auto& b : c.body) collect_expr(b);
    collect_expr(c.head);
  }

  bool any = false;
  std::map<std::string, std::set<Interval>> meet;
  exhaustive_models(
      vars, frame,
      [&](const FiniteModel& m) {
        if (!semantics::eval_formula_at(m, seed, f)) return true;
        if (!any) {
          meet = m.valuation;
          any = true;
        } else {
          for (auto& [v, ivs] : meet) {
            std::set<Interval> inter;
            auto it = m.valuation.find(v);
            if (it != m.valuation.end())
              std::set_intersection(ivs.begin(), ivs.end(), it->second.begin(),
                                    it->second.end(), std::inserter(inter, inter.end()));
            ivs = std::move(inter);
          }
        }
        return true;
      },
      cap);
  if (!any) return std::nullopt;
  FiniteModel least;
  least.frame = frame;
  least.valuation = std::move(meet);
  return least;
}

ClaimReport check_claim_on_all_models(
    const syntax::Formula& premise,
    const std::function<bool(const FiniteModel&, const Interval&)>& conclusion,
    const std::vector<std::string>& vars, const FiniteFrame& frame, int cap) {
  ClaimReport rep;
  exhaustive_models(
      vars, frame,
      [&](const FiniteModel& m) {
        ++rep.models_checked;
        for (const auto& w : frame.intervals()) {
          if (!semantics::eval_formula_at(m, w, premise)) continue;
          ++rep.premise_models;
          if (!conclusion(m, w)) {
            rep.ok = false;
            rep.counterexample = m;
            rep.witness = w;
            return false;
          }
        }
        return true;
      },
      cap);
  return rep;
}

// ---------------------------------------------------------------------------
// Random formulas

namespace {

ExprPtr random_box_literal(std::mt19937_64& rng, int num_vars, int depth) {
  auto pick_leaf = [&]() -> ExprPtr {
    std::uint64_t k = rng() % 16;
    if (k == 0) return syntax::mk_true();
    if (k == 1) return syntax::mk_false();
    return syntax::mk_var("x" + std::to_string(rng() % num_vars));
  };
  ExprPtr e = pick_leaf();
  int wraps = static_cast<int>(rng() % (depth + 1));
  for (int i = 0; i < wraps; ++i)
    e = syntax::mk_box(static_cast<Rel>(rng() % syntax::kRelCount), e);
  return e;
}

}  // namespace

syntax::Formula random_box_horn(std::mt19937_64& rng, int max_vars, int max_clauses,
                                int max_depth) {
  int num_vars = 1 + static_cast<int>(rng() % max_vars);
  syntax::Formula f;
  int num_inits = 1 + static_cast<int>(rng() % 2);
  for (int i = 0; i < num_inits; ++i) {
    ExprPtr init = random_box_literal(rng, num_vars, max_depth);
    if (init->kind == Kind::False) init = syntax::mk_var("x0");
    f.initials.push_back(init);
  }
  int num_clauses = 1 + static_cast<int>(rng() % max_clauses);
  for (int c = 0; c < num_clauses; ++c) {
    syntax::Clause cl;
    int body = 1 + static_cast<int>(rng() % 3);
    for (int b = 0; b < body; ++b)
      cl.body.push_back(random_box_literal(rng, num_vars, max_depth));
    cl.head = rng() % 8 == 0 ? syntax::mk_false()
                             : random_box_literal(rng, num_vars, max_depth);
    f.clauses.push_back(std::move(cl));
  }
  return f;
}

}  // namespace hornhs::oracle

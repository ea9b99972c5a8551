#include "hornhs/closure.hpp"

#include <algorithm>
#include <random>

#include "hornhs/syntax.hpp"

namespace hornhs::closure {

using syntax::ExprPtr;
using syntax::Kind;

std::vector<int> IndexedFormula::var_ids() const {
  std::vector<int> out;
  for (size_t i = 0; i < literals.size(); ++i)
    if (literals[i]->kind == Kind::Var) out.push_back(static_cast<int>(i));
  return out;
}

namespace {

struct Interner {
  IndexedFormula& f;
  std::map<std::string, int> by_key;

  int intern(const ExprPtr& e) {
    std::string key = syntax::render(e);
    auto it = by_key.find(key);
    if (it != by_key.end()) return it->second;
    int id = static_cast<int>(f.literals.size());
    f.literals.push_back(e);
    by_key.emplace(std::move(key), id);
    if (e->kind == Kind::Dia)
      throw BoxHornError("closure requires a box-Horn formula; diamond found: " + key);
    if (e->kind == Kind::Box) {
      int arg = intern(e->arg);
      f.boxes.push_back(IndexedFormula::IBox{e->rel, arg, id});
    }
    return id;
  }

  long occurrences(const ExprPtr& e) {
    if (e->kind == Kind::Box || e->kind == Kind::Dia) return 1 + occurrences(e->arg);
    return 1;
  }

  int literal(const ExprPtr& e) {
    if (!syntax::is_literal(e))
      throw BoxHornError("closure requires a desugared formula");
    f.occurrence_count += occurrences(e);
    return intern(e);
  }
};

}  // namespace

IndexedFormula index_box_horn(const syntax::Formula& f) {
  IndexedFormula out;
  Interner in{out, {}};
  out.true_id = in.intern(syntax::mk_true());
  out.false_id = in.intern(syntax::mk_false());
  for (auto& i : f.initials) out.initial_ids.push_back(in.literal(i));
  for (auto& c : f.clauses) {
    IndexedFormula::IClause ic;
    for (auto& b : c.body) ic.body.push_back(in.literal(b));
    ic.head = in.literal(c.head);
    out.clauses.push_back(std::move(ic));
  }
  return out;
}

ClosureResult close(const IndexedFormula& f, const WorldGraph& g, int seed_world,
                    const std::vector<std::pair<int, int>>& extra_facts,
                    std::uint64_t shuffle_seed) {
  ClosureResult res;
  res.facts.assign(f.literals.size(), Bitset(g.n));
  for (int w = 0; w < g.n; ++w) res.facts[f.true_id].set(w);
  if (seed_world >= 0)
    for (int id : f.initial_ids)
      if (!res.facts[id].test(seed_world)) {
        res.facts[id].set(seed_world);
      }
  for (auto [lit, w] : extra_facts) res.facts[lit].set(w);

  // Rule schedule: 0..boxes-1 = cl1, then cl2 for the same boxes, then cl3.
  int nb = static_cast<int>(f.boxes.size());
  int nc = static_cast<int>(f.clauses.size());
  std::vector<int> order(static_cast<size_t>(2 * nb + nc));
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::mt19937_64 rng(shuffle_seed);

  bool changed = true;
  while (changed) {
    changed = false;
    if (shuffle_seed != 0) std::shuffle(order.begin(), order.end(), rng);
    for (int rule : order) {
      if (rule < nb) {
        // (cl1) [R]l @ w  =>  l @ w' for every w' with w R w'
        const auto& bx = f.boxes[rule];
        const auto& sc = g.succ[static_cast<int>(bx.rel)];
        for (int w = 0; w < g.n; ++w)
          if (res.facts[bx.self].test(w)) {
            int added = res.facts[bx.arg].or_assign(sc[w]);
            if (added) {
              res.rule_applications += added;
              changed = true;
            }
          }
      } else if (rule < 2 * nb) {
        // (cl2) l @ w' for all R-successors w' of w  =>  [R]l @ w
        const auto& bx = f.boxes[rule - nb];
        const auto& sc = g.succ[static_cast<int>(bx.rel)];
        for (int w = 0; w < g.n; ++w)
          if (!res.facts[bx.self].test(w) && sc[w].subset_of(res.facts[bx.arg])) {
            res.facts[bx.self].set(w);
            ++res.rule_applications;
            changed = true;
          }
      } else {
        // (cl3) clause firing
        const auto& c = f.clauses[rule - 2 * nb];
        for (int w = 0; w < g.n; ++w) {
          if (res.facts[c.head].test(w)) continue;
          bool fire = true;
          for (int b : c.body)
            if (!res.facts[b].test(w)) {
              fire = false;
              break;
            }
          if (fire) {
            res.facts[c.head].set(w);
            ++res.rule_applications;
            changed = true;
          }
        }
      }
    }
  }
  res.bottom = res.facts[f.false_id].any();
  return res;
}

}  // namespace hornhs::closure

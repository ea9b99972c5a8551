#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "hornhs/syntax.hpp"

namespace hornhs::closure {

class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(int n) : n_(n), w_((n + 63) / 64, 0) {}

  void set(int i) { w_[i >> 6] |= 1ull << (i & 63); }
  bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1; }
  int size() const { return n_; }

  bool subset_of(const Bitset& o) const {
    for (size_t k = 0; k < w_.size(); ++k)
      if (w_[k] & ~o.w_[k]) return false;
    return true;
  }
  bool intersects(const Bitset& o) const {
    for (size_t k = 0; k < w_.size(); ++k)
      if (w_[k] & o.w_[k]) return true;
    return false;
  }
  // Returns the number of bits newly set.
  int or_assign(const Bitset& o) {
    int added = 0;
    for (size_t k = 0; k < w_.size(); ++k) {
      std::uint64_t nw = w_[k] | o.w_[k];
      added += __builtin_popcountll(nw ^ w_[k]);
      w_[k] = nw;
    }
    return added;
  }
  int count() const {
    int c = 0;
    for (auto w : w_) c += __builtin_popcountll(w);
    return c;
  }
  bool any() const {
    for (auto w : w_)
      if (w) return true;
    return false;
  }
  bool operator==(const Bitset& o) const = default;

 private:
  int n_ = 0;
  std::vector<std::uint64_t> w_;
};

// A multimodal frame with one successor bitmap per world and relation.
// Instantiated with concrete intervals by the oracle and with zones by the
// solver.
struct WorldGraph {
  int n = 0;
  std::array<std::vector<Bitset>, syntax::kRelCount> succ;

  explicit WorldGraph(int worlds) : n(worlds) {
    for (auto& s : succ) s.assign(n, Bitset(n));
  }
  void add_edge(syntax::Rel r, int from, int to) {
    succ[static_cast<int>(r)][from].set(to);
  }
};

// Interned subliterals of a desugared box-Horn formula.
struct IndexedFormula {
  std::vector<syntax::ExprPtr> literals;  // id -> literal
  int true_id = -1;
  int false_id = -1;
  std::vector<int> initial_ids;
  struct IClause {
    std::vector<int> body;
    int head;
  };
  std::vector<IClause> clauses;
  struct IBox {
    syntax::Rel rel;
    int arg;
    int self;
  };
  std::vector<IBox> boxes;     // every box literal occurring in the formula
  long occurrence_count = 0;   // total subterm occurrences (the |phi| measure)

  std::vector<int> var_ids() const;
};

struct BoxHornError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Rejects formulas containing diamonds or non-literal parts.
IndexedFormula index_box_horn(const syntax::Formula& f);

struct ClosureResult {
  std::vector<Bitset> facts;  // per literal id, over worlds
  long rule_applications = 0;
  bool bottom = false;

  bool holds(int lit, int world) const { return facts[lit].test(world); }
};

// Least fixpoint of the closure rules over `g`, seeded with the initial
// conditions at `seed_world` (plus top everywhere). `extra_facts` lets tests
// pin literals at arbitrary worlds. A nonzero `shuffle_seed` randomizes the
// rule application order; the fixpoint must not depend on it.
ClosureResult close(const IndexedFormula& f, const WorldGraph& g, int seed_world,
                    const std::vector<std::pair<int, int>>& extra_facts = {},
                    std::uint64_t shuffle_seed = 0);

}  // namespace hornhs::closure

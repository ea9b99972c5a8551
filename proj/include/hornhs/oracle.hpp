#pragma once

#include <functional>
#include <optional>
#include <random>

#include "hornhs/closure.hpp"
#include "hornhs/semantics.hpp"

namespace hornhs::oracle {

using semantics::FiniteFrame;
using semantics::FiniteModel;
using semantics::Interval;

closure::WorldGraph world_graph(const FiniteFrame& frame);

struct LabelStore {
  closure::IndexedFormula index;
  closure::ClosureResult result;
  const FiniteFrame* frame = nullptr;

  bool holds(const syntax::ExprPtr& literal, const Interval& at) const;
  long rule_applications() const { return result.rule_applications; }
  bool has_bottom() const { return result.bottom; }
};

// Least fixpoint of (cl1)-(cl3) with the initial conditions at `seed`.
LabelStore closure_finite(const syntax::Formula& f, const FiniteFrame& frame,
                          const Interval& seed, std::uint64_t shuffle_seed = 0);

bool is_seed_satisfiable(const syntax::Formula& f, const FiniteFrame& frame,
                         const Interval& seed);

// Requires is_seed_satisfiable; the returned model is the minimal one.
FiniteModel canonical_model_finite(const syntax::Formula& f, const FiniteFrame& frame,
                                   const Interval& seed);

inline constexpr int kDefaultEnumerationCap = 24;

struct EnumerationCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Calls fn for each of the 2^(|vars|*|Int|) valuations in deterministic
// order; fn returning false stops the enumeration.
void exhaustive_models(const std::vector<std::string>& vars, const FiniteFrame& frame,
                       const std::function<bool(const FiniteModel&)>& fn,
                       int cap = kDefaultEnumerationCap);

long exhaustive_model_count(const std::vector<std::string>& vars, const FiniteFrame& frame,
                            int cap = kDefaultEnumerationCap);

// True iff some enumerated model satisfies f somewhere.
bool exhaustively_satisfiable(const syntax::Formula& f, const FiniteFrame& frame,
                              int cap = kDefaultEnumerationCap);
bool exhaustively_seed_satisfiable(const syntax::Formula& f, const FiniteFrame& frame,
                                   const Interval& seed, int cap = kDefaultEnumerationCap);

// Intersection of all valuations satisfying f at seed (the least model of a
// box-Horn formula), or nullopt when unsatisfiable. Independent of the
// closure path.
std::optional<FiniteModel> least_model_exhaustive(const syntax::Formula& f,
                                                  const FiniteFrame& frame,
                                                  const Interval& seed,
                                                  int cap = kDefaultEnumerationCap);

struct ClaimReport {
  bool ok = true;
  long models_checked = 0;
  long premise_models = 0;
  std::optional<FiniteModel> counterexample;
  std::optional<Interval> witness;
};

// Enumerates all valuations of `vars`; for every model and every world
// satisfying `premise` there, `conclusion(model, witness)` must hold.
ClaimReport check_claim_on_all_models(
    const syntax::Formula& premise,
    const std::function<bool(const FiniteModel&, const Interval&)>& conclusion,
    const std::vector<std::string>& vars, const FiniteFrame& frame,
    int cap = kDefaultEnumerationCap);

// Deterministic random box-Horn formula in desugared form.
syntax::Formula random_box_horn(std::mt19937_64& rng, int max_vars, int max_clauses,
                                int max_depth);

}  // namespace hornhs::oracle

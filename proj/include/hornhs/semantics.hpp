#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hornhs/syntax.hpp"

namespace hornhs::semantics {

using syntax::Rel;

enum class Flavor : std::uint8_t { Reflexive, Irreflexive };

struct Semantics {
  Flavor flavor = Flavor::Irreflexive;
  bool strict = false;  // strict frames exclude punctual intervals

  bool operator==(const Semantics& o) const = default;
};

struct Interval {
  int start = 0;
  int end = 0;

  bool punctual() const { return start == end; }
  auto operator<=>(const Interval&) const = default;
};

std::string to_string(const Interval& i);

// All intervals over the chain 0..size-1 under the given strictness.
struct FiniteFrame {
  int size = 0;
  Semantics sem;

  FiniteFrame() = default;
  FiniteFrame(int size_, Semantics sem_);

  const std::vector<Interval>& intervals() const { return intervals_; }
  int interval_count() const { return static_cast<int>(intervals_.size()); }
  int id_of(const Interval& i) const;  // -1 if not in the frame
  const Interval& interval(int id) const { return intervals_[id]; }
  bool contains(const Interval& i) const { return id_of(i) >= 0; }

 private:
  std::vector<Interval> intervals_;
  std::vector<int> id_;  // triangular lookup
};

bool relation_holds(Rel r, const Interval& i, const Interval& j, const Semantics& s);

std::vector<Interval> successors(const FiniteFrame& f, const Interval& i, Rel r);

struct FiniteModel {
  FiniteFrame frame;
  std::map<std::string, std::set<Interval>> valuation;

  bool holds(const std::string& var, const Interval& i) const;
};

// Truth relation for desugared formulas, literals and clauses.
bool eval(const FiniteModel& m, const Interval& at, const syntax::ExprPtr& literal);
bool eval_clause(const FiniteModel& m, const syntax::Clause& c);
bool eval_formula_at(const FiniteModel& m, const Interval& at, const syntax::Formula& f);

// First witness interval in lexicographic (start, end) order, if any.
std::optional<Interval> model_satisfies(const FiniteModel& m, const syntax::Formula& f);

struct ModelIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

FiniteModel read_model(const std::string& text);
std::string write_model(const FiniteModel& m);

}  // namespace hornhs::semantics

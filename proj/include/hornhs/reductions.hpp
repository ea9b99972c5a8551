#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hornhs/closure.hpp"
#include "hornhs/semantics.hpp"
#include "hornhs/syntax.hpp"

namespace hornhs::reductions {

using semantics::FiniteModel;
using semantics::Interval;
using syntax::Clause;
using syntax::ExprPtr;
using syntax::Formula;
using syntax::FreshVars;
using syntax::Rel;

struct TmError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Single-tape right-infinite deterministic machine with the left marker "$"
// outside the tape alphabet. The blank is the first alphabet symbol and is
// written "_".
struct TuringMachine {
  std::vector<std::string> states;
  std::string initial;
  std::string halt;
  std::vector<std::string> alphabet;  // alphabet[0] is the blank

  struct Action {
    enum class Kind : std::uint8_t { Write, MoveLeft, MoveRight } kind;
    std::string state;
    std::string symbol;  // Write only
  };
  std::map<std::pair<std::string, std::string>, Action> delta;  // (state, symbol or "$")

  const std::string& blank() const { return alphabet[0]; }
  const Action& step(const std::string& state, const std::string& symbol) const;
  void validate() const;  // delta total off the halt state; "$" always moves right
};

TuringMachine read_tm(const std::string& text);

// One linearized tape cell: a plain symbol, the left marker, or a
// head-marked symbol.
struct Cell {
  bool head = false;
  std::string state;   // head cells only
  std::string symbol;  // tape symbol or "$"

  auto operator<=>(const Cell&) const = default;
};
std::string cell_token(const Cell& c);  // variable-name fragment

using Configuration = std::vector<Cell>;

// Fixed keeps every configuration at length N (the machine must never visit
// the last cell); Growing gives configuration n length n+2.
enum class ConfigConvention : std::uint8_t { Fixed, Growing };

std::vector<Configuration> simulate(const TuringMachine& tm, int steps,
                                    ConfigConvention conv, int n_cells = 0);
bool halts_within(const TuringMachine& tm, int steps);

using Triple = std::array<Cell, 3>;
std::set<Triple> w_set(const TuringMachine& tm);
Cell tau(const TuringMachine& tm, const Triple& t);  // throws if t is not in W
bool in_w_set(const TuringMachine& tm, const Triple& t);
std::vector<Cell> gamma_symbols(const TuringMachine& tm);  // all of Gamma

// --- gadget tricks -------------------------------------------------------
// Each returns the clause list of the gadget; fresh variables are drawn from
// the supplied namespace counter.

// Fresh-variable placement record for soundness-model construction.
struct BimpTrace {
  ExprPtr l1, l2, l;
  std::string m1, m2, m;
  bool vertical = false;
};

// [l1 & l2 =>H l]: horizontal binary implication (7 core clauses).
std::vector<Clause> binary_implication_h(const ExprPtr& l1, const ExprPtr& l2,
                                         const ExprPtr& l, FreshVars& fv,
                                         std::vector<BimpTrace>* trace = nullptr);
// Mirrored (vertical) variant.
std::vector<Clause> binary_implication_v(const ExprPtr& l1, const ExprPtr& l2,
                                         const ExprPtr& l, FreshVars& fv,
                                         std::vector<BimpTrace>* trace = nullptr);
// Diagonal variant (3 box-core clauses, one fresh variable).
std::vector<Clause> binary_implication_diag(const ExprPtr& l1, const ExprPtr& l2,
                                            const ExprPtr& l, FreshVars& fv);
// [phi ~> l]: moves a fact one unit up and one unit left (box Horn).
std::vector<Clause> nw_next(const std::vector<ExprPtr>& phi, const ExprPtr& l,
                            FreshVars& fv);

struct GeneratorOptions {
  bool fin = false;  // finite-satisfiability variant
};

Formula gen_pspace_core(const TuringMachine& tm, int n_cells, const GeneratorOptions& o);
Formula gen_pspace_core_traced(const TuringMachine& tm, int n_cells,
                               const GeneratorOptions& o, std::vector<BimpTrace>* trace);
Formula gen_pspace_box_core(const TuringMachine& tm, int n_cells, const GeneratorOptions& o);
Formula gen_diamond_horn(const TuringMachine& tm, const GeneratorOptions& o);
Formula gen_diamond_horn_refl(const TuringMachine& tm, const GeneratorOptions& o);
Formula gen_core_irreflexive(const TuringMachine& tm, const GeneratorOptions& o);
Formula gen_core_irreflexive_traced(const TuringMachine& tm, const GeneratorOptions& o,
                                    std::vector<BimpTrace>* trace);
Formula gen_box_horn_discrete(const TuringMachine& tm, const GeneratorOptions& o);

// --- grid enumeration ----------------------------------------------------

struct GridPoint {
  int col = 0, row = 0;
  bool operator==(const GridPoint&) const = default;
};
GridPoint grid_point(int n);          // Cantor-style enumeration of the nw octant
int grid_index(const GridPoint& p);
int up_neighbour(int n);              // index of (col, row+1)
bool on_diagonal(int n);

// --- bounded-window soundness -------------------------------------------

enum class Construction : std::uint8_t { PspaceCore, DiamondHorn, CoreIrrefl, BoxHorn };

struct SoundnessModel {
  FiniteModel model;
  Interval seed;
  // The formula whose fresh variables were placed during construction.
  Formula formula;
};

// The intended model of the construction restricted to `window_units` units.
// The machine must not halt inside the window.
SoundnessModel build_soundness_model(const TuringMachine& tm, Construction c,
                                     int window_units);

// Memoized truth sets of literals over one fixed model.
class LiteralExtensions {
 public:
  explicit LiteralExtensions(const FiniteModel& m);
  const closure::Bitset& of(const ExprPtr& literal);
  bool holds(const ExprPtr& literal, const Interval& at);

 private:
  const FiniteModel& m_;
  std::array<std::vector<closure::Bitset>, syntax::kRelCount> succ_;
  std::map<std::string, closure::Bitset> memo_;
};

struct WindowReport {
  long instances = 0;
  long passed = 0;
  long skipped = 0;
  bool initials_ok = true;
  struct Failure {
    size_t clause;  // index into the formula's clause list
    Interval world;
  };
  std::vector<Failure> failures;

  bool ok() const { return initials_ok && failures.empty(); }
};

// Evaluates initial conditions at `seed` and every clause instance whose
// world keeps `margin` chain positions of slack at both ends; instances
// touching the boundary are counted as skipped, never as failures. The
// two-margin form keeps different amounts of slack at the low and high end
// (pointer-style constructions need more room above than below).
WindowReport check_window(const FiniteModel& m, const Formula& f, const Interval& seed,
                          int margin);
WindowReport check_window(const FiniteModel& m, const Formula& f, const Interval& seed,
                          int lo_margin, int hi_margin);

// --- exhaustive gadget verification ---------------------------------------

struct TrickReport {
  std::string name;
  bool ok = true;
  long cases = 0;  // models / placements examined
  std::string detail;
};

TrickReport verify_claim_binary_implication(int chain, semantics::Flavor flavor);
TrickReport verify_claim_diagonal(int chain);
TrickReport verify_claim_nw_next(int chain);
TrickReport verify_grid_succ_uniqueness(int chain, bool vertical);
std::vector<TrickReport> verify_trick_claims(int chain);

}  // namespace hornhs::reductions

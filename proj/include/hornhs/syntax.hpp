#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hornhs::syntax {

// The twelve interval relations. Barred partners are kept adjacent so that
// inverse() is a single bit flip.
enum class Rel : std::uint8_t {
  A, Abar, B, Bbar, E, Ebar, D, Dbar, L, Lbar, O, Obar
};
inline constexpr int kRelCount = 12;

Rel inverse(Rel r);   // A <-> A~, B <-> B~, ...
Rel mirror(Rel r);    // time reversal: A <-> A~, B <-> E, B~ <-> E~, L <-> L~, O <-> O~, D and D~ fixed
const char* rel_name(Rel r);                 // "A", "A~", ...
std::optional<Rel> rel_from_name(const std::string& s);
std::vector<Rel> all_relations();

// Expression tree. Core literals are True/False/Var/Dia/Box chains; And, Or,
// Not and Impl only appear in the extended surface syntax and are removed by
// desugar().
enum class Kind : std::uint8_t { True, False, Var, Dia, Box, And, Or, Not, Impl };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  Kind kind;
  std::string var;               // Var
  Rel rel = Rel::A;              // Dia/Box
  ExprPtr arg;                   // Dia/Box/Not
  std::vector<ExprPtr> parts;    // And/Or conjuncts, Impl body
  ExprPtr head;                  // Impl
  int line = 0, col = 0;
};

ExprPtr mk_true();
ExprPtr mk_false();
ExprPtr mk_var(std::string name);
ExprPtr mk_dia(Rel r, ExprPtr e);
ExprPtr mk_box(Rel r, ExprPtr e);
ExprPtr mk_not(ExprPtr e);
ExprPtr mk_and(std::vector<ExprPtr> parts);
ExprPtr mk_or(std::vector<ExprPtr> parts);
ExprPtr mk_impl(std::vector<ExprPtr> body, ExprPtr head);
ExprPtr mk_modal(bool box, Rel r, ExprPtr e);

bool equal(const ExprPtr& a, const ExprPtr& b);
bool is_literal(const ExprPtr& e);           // core literal per the clause grammar
bool contains_dia(const ExprPtr& e);
bool contains_box(const ExprPtr& e);

// A clause [U](body -> head). Body conjuncts are kept in source order.
struct Clause {
  std::vector<ExprPtr> body;
  ExprPtr head;
};

struct Formula {
  std::vector<ExprPtr> initials;
  std::vector<Clause> clauses;

  bool operator==(const Formula& o) const;
};

struct FragmentInfo {
  bool is_horn = false;
  bool is_core = false;
  bool box_only = false;
  bool diamond_only = false;
};

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(std::string msg, int line_, int col_)
      : std::runtime_error(std::move(msg)), line(line_), col(col_) {}
};

struct DesugarError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Deterministic fresh-variable supply. User identifiers may not start with
// an underscore, so "_<ns>_<i>" never collides.
std::string fresh_var(const std::string& ns, int index);

class FreshVars {
 public:
  std::string next(const std::string& ns) { return fresh_var(ns, counters_++); }
 private:
  int counters_ = 0;
};

Formula parse_formula(const std::string& text);
std::string render(const ExprPtr& e);
std::string render(const Formula& f);

// Rewrites the extended surface syntax (negated heads, conjunctive heads,
// nested modal implications, diamond-on-body forms) into the plain clause
// grammar. Equisatisfiable with the input; fresh variables come from `fv`.
Formula desugar(const Formula& f, FreshVars& fv);
Formula desugar(const Formula& f);

FragmentInfo classify(const Formula& f);     // f must be desugared
Formula mirror(const Formula& f);            // f must be desugared
ExprPtr mirror(const ExprPtr& e);

}  // namespace hornhs::syntax

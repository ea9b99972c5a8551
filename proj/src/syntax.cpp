#include "hornhs/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace hornhs::syntax {

Rel inverse(Rel r) {
  auto v = static_cast<std::uint8_t>(r);
  return static_cast<Rel>(v ^ 1u);
}

Rel mirror(Rel r) {
  switch (r) {
    case Rel::A:    return Rel::Abar;
    case Rel::Abar: return Rel::A;
    case Rel::B:    return Rel::E;
    case Rel::E:    return Rel::B;
    case Rel::Bbar: return Rel::Ebar;
    case Rel::Ebar: return Rel::Bbar;
    case Rel::L:    return Rel::Lbar;
    case Rel::Lbar: return Rel::L;
    case Rel::O:    return Rel::Obar;
    case Rel::Obar: return Rel::O;
    case Rel::D:    return Rel::D;
    case Rel::Dbar: return Rel::Dbar;
  }
  return r;
}

const char* rel_name(Rel r) {
  switch (r) {
    case Rel::A:    return "A";
    case Rel::Abar: return "A~";
    case Rel::B:    return "B";
    case Rel::Bbar: return "B~";
    case Rel::E:    return "E";
    case Rel::Ebar: return "E~";
    case Rel::D:    return "D";
    case Rel::Dbar: return "D~";
    case Rel::L:    return "L";
    case Rel::Lbar: return "L~";
    case Rel::O:    return "O";
    case Rel::Obar: return "O~";
  }
  return "?";
}

std::optional<Rel> rel_from_name(const std::string& s) {
  for (Rel r : all_relations())
    if (s == rel_name(r)) return r;
  return std::nullopt;
}

std::vector<Rel> all_relations() {
  std::vector<Rel> out;
  for (int i = 0; i < kRelCount; ++i) out.push_back(static_cast<Rel>(i));
  return out;
}

namespace {
ExprPtr make(Kind k) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  return e;
}
}  // namespace

ExprPtr mk_true() { return make(Kind::True); }
ExprPtr mk_false() { return make(Kind::False); }

ExprPtr mk_var(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Var;
  e->var = std::move(name);
  return e;
}

ExprPtr mk_dia(Rel r, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Dia;
  e->rel = r;
  e->arg = std::move(a);
  return e;
}

ExprPtr mk_box(Rel r, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Box;
  e->rel = r;
  e->arg = std::move(a);
  return e;
}

ExprPtr mk_modal(bool box, Rel r, ExprPtr e) {
  return box ? mk_box(r, std::move(e)) : mk_dia(r, std::move(e));
}

ExprPtr mk_not(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Not;
  e->arg = std::move(a);
  return e;
}

ExprPtr mk_and(std::vector<ExprPtr> parts) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::And;
  e->parts = std::move(parts);
  return e;
}

ExprPtr mk_or(std::vector<ExprPtr> parts) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Or;
  e->parts = std::move(parts);
  return e;
}

ExprPtr mk_impl(std::vector<ExprPtr> body, ExprPtr head) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Impl;
  e->parts = std::move(body);
  e->head = std::move(head);
  return e;
}

bool equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::True:
    case Kind::False:
      return true;
    case Kind::Var:
      return a->var == b->var;
    case Kind::Dia:
    case Kind::Box:
      return a->rel == b->rel && equal(a->arg, b->arg);
    case Kind::Not:
      return equal(a->arg, b->arg);
    case Kind::And:
    case Kind::Or: {
      if (a->parts.size() != b->parts.size()) return false;
      for (size_t i = 0; i < a->parts.size(); ++i)
        if (!equal(a->parts[i], b->parts[i])) return false;
      return true;
    }
    case Kind::Impl: {
      if (a->parts.size() != b->parts.size()) return false;
      for (size_t i = 0; i < a->parts.size(); ++i)
        if (!equal(a->parts[i], b->parts[i])) return false;
      return equal(a->head, b->head);
    }
  }
  return false;
}

bool is_literal(const ExprPtr& e) {
  switch (e->kind) {
    case Kind::True:
    case Kind::False:
    case Kind::Var:
      return true;
    case Kind::Dia:
    case Kind::Box:
      return is_literal(e->arg);
    default:
      return false;
  }
}

bool contains_dia(const ExprPtr& e) {
  if (e->kind == Kind::Dia) return true;
  if (e->arg && contains_dia(e->arg)) return true;
  for (auto& p : e->parts)
    if (contains_dia(p)) return true;
  return e->head && contains_dia(e->head);
}

bool contains_box(const ExprPtr& e) {
  if (e->kind == Kind::Box) return true;
  if (e->arg && contains_box(e->arg)) return true;
  for (auto& p : e->parts)
    if (contains_box(p)) return true;
  return e->head && contains_box(e->head);
}

bool Formula::operator==(const Formula& o) const {
  if (initials.size() != o.initials.size() || clauses.size() != o.clauses.size())
    return false;
  for (size_t i = 0; i < initials.size(); ++i)
    if (!equal(initials[i], o.initials[i])) return false;
  for (size_t i = 0; i < clauses.size(); ++i) {
    if (clauses[i].body.size() != o.clauses[i].body.size()) return false;
    for (size_t j = 0; j < clauses[i].body.size(); ++j)
      if (!equal(clauses[i].body[j], o.clauses[i].body[j])) return false;
    if (!equal(clauses[i].head, o.clauses[i].head)) return false;
  }
  return true;
}

std::string fresh_var(const std::string& ns, int index) {
  return "_" + ns + "_" + std::to_string(index);
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print_expr(std::ostringstream& os, const ExprPtr& e, bool parenthesize_composite) {
  switch (e->kind) {
    case Kind::True:  os << "true"; return;
    case Kind::False: os << "false"; return;
    case Kind::Var:   os << e->var; return;
    case Kind::Dia:
    case Kind::Box: {
      os << (e->kind == Kind::Dia ? "<" : "[") << rel_name(e->rel)
         << (e->kind == Kind::Dia ? ">" : "]");
      print_expr(os, e->arg, true);
      return;
    }
    case Kind::Not:
      os << "!";
      print_expr(os, e->arg, true);
      return;
    case Kind::And:
    case Kind::Or: {
      if (parenthesize_composite) os << "(";
      const char* sep = e->kind == Kind::And ? " & " : " | ";
      for (size_t i = 0; i < e->parts.size(); ++i) {
        if (i) os << sep;
        print_expr(os, e->parts[i], true);
      }
      if (parenthesize_composite) os << ")";
      return;
    }
    case Kind::Impl: {
      os << "(";
      for (size_t i = 0; i < e->parts.size(); ++i) {
        if (i) os << " & ";
        print_expr(os, e->parts[i], true);
      }
      os << " -> ";
      print_expr(os, e->head, false);
      os << ")";
      return;
    }
  }
}

}  // namespace

std::string render(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(os, e, false);
  return os.str();
}

std::string render(const Formula& f) {
  std::ostringstream os;
  bool first = true;
  auto sep = [&] {
    if (!first) os << " ; ";
    first = false;
  };
  for (auto& init : f.initials) {
    sep();
    print_expr(os, init, false);
  }
  for (auto& c : f.clauses) {
    sep();
    os << "[U](";
    for (size_t i = 0; i < c.body.size(); ++i) {
      if (i) os << " & ";
      print_expr(os, c.body[i], true);
    }
    os << " -> ";
    print_expr(os, c.head, false);
    os << ")";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Lexer {
  const std::string& text;
  size_t pos = 0;
  int line = 1, col = 1;

  explicit Lexer(const std::string& t) : text(t) {}

  void advance() {
    if (pos < text.size()) {
      if (text[pos] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++pos;
    }
  }

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == '#') {
        while (pos < text.size() && text[pos] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, line, col); }

  bool try_consume(char c) {
    if (peek() == c) {
      advance();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!try_consume(c)) fail(std::string("expected '") + c + "'");
  }

  bool try_consume_arrow() {
    skip_ws();
    if (pos + 1 < text.size() && text[pos] == '-' && text[pos + 1] == '>') {
      advance();
      advance();
      return true;
    }
    return false;
  }

  std::string ident() {
    skip_ws();
    if (pos >= text.size() ||
        !(std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
      fail("expected identifier");
    std::string out;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      out += text[pos];
      advance();
    }
    return out;
  }
};

struct Parser {
  Lexer lx;
  explicit Parser(const std::string& t) : lx(t) {}

  Rel relation(char closer) {
    int l = lx.line, c = lx.col;
    std::string name = lx.ident();
    if (lx.peek() == '~') {
      lx.advance();
      name += '~';
    }
    auto r = rel_from_name(name);
    if (!r) throw ParseError("unknown relation symbol '" + name + "'", l, c);
    lx.expect(closer);
    return *r;
  }

  // literal := true | false | IDENT | <R> arg | [R] arg
  // arg     := literal | "(" group ")"
  // group   := orexpr [ "->" head ]
  ExprPtr literal() {
    int l = lx.line, c = lx.col;
    char ch = lx.peek();
    ExprPtr out;
    if (ch == '<' || ch == '[') {
      lx.advance();
      bool box = ch == '[';
      Rel r = relation(box ? ']' : '>');
      out = mk_modal(box, r, modal_arg());
    } else {
      std::string name = lx.ident();
      if (name == "true")
        out = mk_true();
      else if (name == "false")
        out = mk_false();
      else
        out = mk_var(name);
    }
    const_cast<Expr*>(out.get())->line = l;
    const_cast<Expr*>(out.get())->col = c;
    return out;
  }

  ExprPtr modal_arg() {
    if (lx.peek() == '(') {
      lx.advance();
      ExprPtr body = orexpr();
      if (lx.try_consume_arrow()) {
        ExprPtr h = head();
        lx.expect(')');
        std::vector<ExprPtr> terms =
            body->kind == Kind::And ? body->parts : std::vector<ExprPtr>{body};
        return mk_impl(std::move(terms), h);
      }
      lx.expect(')');
      return body;
    }
    return literal();
  }

  ExprPtr andexpr() {
    std::vector<ExprPtr> terms{literal()};
    while (lx.try_consume('&')) terms.push_back(literal());
    return terms.size() == 1 ? terms[0] : mk_and(std::move(terms));
  }

  ExprPtr orexpr() {
    std::vector<ExprPtr> terms{andexpr()};
    while (lx.try_consume('|')) terms.push_back(andexpr());
    return terms.size() == 1 ? terms[0] : mk_or(std::move(terms));
  }

  ExprPtr head_term() {
    if (lx.try_consume('!')) return mk_not(literal());
    return literal();
  }

  ExprPtr head() {
    std::vector<ExprPtr> terms{head_term()};
    while (lx.try_consume('&')) terms.push_back(head_term());
    return terms.size() == 1 ? terms[0] : mk_and(std::move(terms));
  }

  // conjunct := "[U](" body "->" head ")" | literal
  void conjunct(Formula& f) {
    lx.skip_ws();
    size_t save_pos = lx.pos;
    int save_line = lx.line, save_col = lx.col;
    if (lx.peek() == '[') {
      lx.advance();
      std::string name;
      if (std::isalpha(static_cast<unsigned char>(lx.peek()))) name = lx.ident();
      if (name == "U") {
        lx.expect(']');
        lx.expect('(');
        ExprPtr body = orexpr();
        if (!lx.try_consume_arrow()) lx.fail("expected '->' in clause");
        ExprPtr h = head();
        lx.expect(')');
        Clause c;
        c.body = body->kind == Kind::And ? body->parts : std::vector<ExprPtr>{body};
        c.head = h;
        f.clauses.push_back(std::move(c));
        return;
      }
      lx.pos = save_pos;
      lx.line = save_line;
      lx.col = save_col;
    }
    f.initials.push_back(literal());
  }

  Formula formula() {
    Formula f;
    conjunct(f);
    while (lx.try_consume(';')) conjunct(f);
    if (!lx.eof()) lx.fail("unexpected trailing input");
    return f;
  }
};

}  // namespace

Formula parse_formula(const std::string& text) {
  Parser p(text);
  return p.formula();
}

// ---------------------------------------------------------------------------
// Desugaring

namespace {

// True when every box occurrence of the parsed formula sits inside a clause
// head. Such formulas are pushed towards the diamond fragment: boxed heads
// [R]h are replaced through the converse equivalence by <R~>-guarded bodies.
bool diamond_leaning(const Formula& f) {
  bool any_dia = false;
  for (auto& i : f.initials) {
    any_dia |= contains_dia(i);
    if (contains_box(i)) return false;
  }
  for (auto& c : f.clauses) {
    for (auto& b : c.body) {
      any_dia |= contains_dia(b);
      if (contains_box(b)) return false;
    }
    any_dia |= contains_dia(c.head);
  }
  return any_dia;
}

struct Desugarer {
  FreshVars& fv;
  bool dia_mode;
  std::vector<Clause> out;

  [[noreturn]] static void reject(const std::string& what) {
    throw DesugarError("non-Horn construct rejected: " + what);
  }

  // Flattens one body term into core literals, emitting companion clauses for
  // diamond- or box-of-conjunction forms.
  void body_term(const ExprPtr& e, std::vector<ExprPtr>& acc) {
    switch (e->kind) {
      case Kind::Or:
        reject("disjunction");
      case Kind::Not:
        reject("negation outside a clause head");
      case Kind::Impl:
        reject("implication in a clause body");
      case Kind::And:
        for (auto& p : e->parts) body_term(p, acc);
        return;
      case Kind::Box: {
        if (is_literal(e)) {
          acc.push_back(e);
          return;
        }
        // [R](c1 & c2) in a body is the conjunction of the boxed conjuncts.
        if (e->arg->kind == Kind::And) {
          for (auto& p : e->arg->parts) body_term(mk_box(e->rel, p), acc);
          return;
        }
        reject("boxed implication in a clause body");
      }
      case Kind::Dia: {
        if (is_literal(e)) {
          acc.push_back(e);
          return;
        }
        if (e->arg->kind == Kind::And) {
          // <R>(c1 & ... & cn): name the conjunction with a fresh variable.
          std::vector<ExprPtr> inner;
          for (auto& p : e->arg->parts) body_term(p, inner);
          auto w = mk_var(fv.next("d"));
          emit(std::move(inner), w);
          acc.push_back(mk_dia(e->rel, w));
          return;
        }
        reject("diamond implication in a clause body");
      }
      default:
        acc.push_back(e);
        return;
    }
  }

  // Emits body -> head once head is a core literal.
  void emit(std::vector<ExprPtr> body, const ExprPtr& head) {
    std::vector<ExprPtr> flat;
    for (auto& b : body) body_term(b, flat);
    if (flat.empty()) flat.push_back(mk_true());
    out.push_back(Clause{std::move(flat), head});
  }

  void clause(std::vector<ExprPtr> body, ExprPtr head) {
    switch (head->kind) {
      case Kind::Or:
        reject("disjunction");
      case Kind::And: {
        for (auto& h : head->parts) clause(body, h);
        return;
      }
      case Kind::Not: {
        // [U](psi -> !l)  ~>  [U](psi & l -> false)
        if (!is_literal(head->arg)) reject("negation of a non-literal head");
        body.push_back(head->arg);
        clause(std::move(body), mk_false());
        return;
      }
      case Kind::Impl:
        reject("bare implication head");
      case Kind::Box:
      case Kind::Dia: {
        bool box = head->kind == Kind::Box;
        if (head->arg->kind == Kind::And) {
          if (box) {
            // [R](c1 & ... & cn) head splits into boxed conjuncts.
            std::vector<ExprPtr> hs;
            for (auto& p : head->arg->parts) hs.push_back(mk_box(head->rel, p));
            clause(std::move(body), mk_and(std::move(hs)));
          } else {
            // <R>(c1 & ... & cn) head needs one shared witness.
            auto w = mk_var(fv.next("d"));
            clause(std::move(body), mk_dia(head->rel, w));
            for (auto& p : head->arg->parts) clause({w}, p);
          }
          return;
        }
        if (head->arg->kind == Kind::Not) {
          clause(std::move(body),
                 mk_modal(box, head->rel, mk_impl({head->arg->arg}, mk_false())));
          return;
        }
        if (head->arg->kind == Kind::Impl) {
          if (box && dia_mode) {
            // [U](l -> [R](chi -> h)) ~> [U](<R~>l & chi -> h); multi-literal
            // bodies are first funneled through a fresh variable.
            ExprPtr guard;
            if (body.size() == 1 && is_literal(body[0])) {
              guard = body[0];
            } else {
              guard = mk_var(fv.next("d"));
              clause(std::move(body), guard);
            }
            std::vector<ExprPtr> nb{mk_dia(inverse(head->rel), guard)};
            for (auto& p : head->arg->parts) nb.push_back(p);
            clause(std::move(nb), head->arg->head);
            return;
          }
          // [U](psi -> [R](chi -> h)) ~> [U](psi -> [R]p) and [U](p & chi -> h).
          auto p = mk_var(fv.next("d"));
          clause(std::move(body), mk_modal(box, head->rel, p));
          std::vector<ExprPtr> nb{p};
          for (auto& q : head->arg->parts) nb.push_back(q);
          clause(std::move(nb), head->arg->head);
          return;
        }
        if (box && dia_mode && is_literal(head->arg)) {
          // [U](l -> [R]h) ~> [U](<R~>l -> h)
          ExprPtr guard;
          if (body.size() == 1 && is_literal(body[0])) {
            guard = body[0];
          } else {
            guard = mk_var(fv.next("d"));
            clause(std::move(body), guard);
          }
          clause({mk_dia(inverse(head->rel), guard)}, head->arg);
          return;
        }
        if (!is_literal(head)) reject("unsupported modal head");
        emit(std::move(body), head);
        return;
      }
      default:
        emit(std::move(body), head);
        return;
    }
  }
};

// True when every diamond in a desugared formula occurs as a top-level body
// literal, so the whole formula can be pushed into the box fragment.
bool diamonds_only_on_bodies(const Formula& f) {
  bool any = false;
  for (auto& i : f.initials)
    if (contains_dia(i)) return false;
  for (auto& c : f.clauses) {
    if (contains_dia(c.head)) return false;
    for (auto& b : c.body) {
      if (b->kind == Kind::Dia) {
        if (contains_dia(b->arg)) return false;
        any = true;
      } else if (contains_dia(b)) {
        return false;
      }
    }
  }
  return any;
}

}  // namespace

Formula desugar(const Formula& f, FreshVars& fv) {
  Desugarer ds{fv, diamond_leaning(f), {}};

  Formula out;
  for (auto& init : f.initials) {
    if (init->kind == Kind::And) {
      for (auto& p : init->parts) {
        if (!is_literal(p)) Desugarer::reject("composite initial condition");
        out.initials.push_back(p);
      }
    } else {
      if (!is_literal(init)) Desugarer::reject("composite initial condition");
      out.initials.push_back(init);
    }
  }
  for (auto& c : f.clauses) ds.clause(c.body, c.head);
  out.clauses = std::move(ds.out);

  // Box-leaning formulas whose only diamonds are top-level body guards are
  // rewritten to pure box form: [U](<R>l & psi -> h) ~> [U](l -> [R~](psi -> h)).
  if (diamonds_only_on_bodies(out)) {
    Desugarer ds2{fv, false, {}};
    std::vector<Clause> pending = std::move(out.clauses);
    out.clauses.clear();
    for (auto& c : pending) {
      size_t dia_at = c.body.size();
      for (size_t i = 0; i < c.body.size(); ++i)
        if (c.body[i]->kind == Kind::Dia) {
          dia_at = i;
          break;
        }
      if (dia_at == c.body.size()) {
        out.clauses.push_back(c);
        continue;
      }
      ExprPtr guard = c.body[dia_at]->arg;
      Rel rbar = inverse(c.body[dia_at]->rel);
      std::vector<ExprPtr> rest;
      for (size_t i = 0; i < c.body.size(); ++i)
        if (i != dia_at) rest.push_back(c.body[i]);
      if (rest.empty()) {
        ds2.clause({guard}, mk_box(rbar, c.head));
      } else {
        ds2.clause({guard}, mk_box(rbar, mk_impl(std::move(rest), c.head)));
      }
    }
    for (auto& c : ds2.out) out.clauses.push_back(c);
    // Converting one guard can leave further guards behind the fresh variable;
    // iterate until the clause set is stable.
    if (diamonds_only_on_bodies(out)) {
      FreshVars& fv2 = fv;
      return desugar(out, fv2);
    }
  }
  return out;
}

Formula desugar(const Formula& f) {
  FreshVars fv;
  return desugar(f, fv);
}

FragmentInfo classify(const Formula& f) {
  FragmentInfo info;
  info.is_horn = true;
  info.box_only = true;
  info.diamond_only = true;
  info.is_core = true;
  auto scan = [&](const ExprPtr& e) {
    if (contains_dia(e)) info.box_only = false;
    if (contains_box(e)) info.diamond_only = false;
  };
  for (auto& i : f.initials) scan(i);
  for (auto& c : f.clauses) {
    for (auto& b : c.body) scan(b);
    scan(c.head);
    bool core_shape = c.body.size() == 1 ||
                      (c.body.size() == 2 && c.head->kind == Kind::False);
    if (!core_shape) info.is_core = false;
  }
  return info;
}

ExprPtr mirror(const ExprPtr& e) {
  switch (e->kind) {
    case Kind::Dia:
      return mk_dia(mirror(e->rel), mirror(e->arg));
    case Kind::Box:
      return mk_box(mirror(e->rel), mirror(e->arg));
    default:
      return e;
  }
}

Formula mirror(const Formula& f) {
  Formula out;
  for (auto& i : f.initials) out.initials.push_back(mirror(i));
  for (auto& c : f.clauses) {
    Clause mc;
    for (auto& b : c.body) mc.body.push_back(mirror(b));
    mc.head = mirror(c.head);
    out.clauses.push_back(std::move(mc));
  }
  return out;
}

}  // namespace hornhs::syntax

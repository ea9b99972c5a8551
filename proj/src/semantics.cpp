#include "hornhs/semantics.hpp"

#include <sstream>

namespace hornhs::semantics {

std::string to_string(const Interval& i) {
  return "(" + std::to_string(i.start) + "," + std::to_string(i.end) + ")";
}

FiniteFrame::FiniteFrame(int size_, Semantics sem_) : size(size_), sem(sem_) {
  id_.assign(static_cast<size_t>(size) * size, -1);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x <= y; ++x) {
      if (sem.strict && x == y) continue;
      id_[static_cast<size_t>(x) * size + y] = static_cast<int>(intervals_.size());
      intervals_.push_back(Interval{x, y});
    }
}

int FiniteFrame::id_of(const Interval& i) const {
  if (i.start < 0 || i.end >= size || i.start > i.end) return -1;
  return id_[static_cast<size_t>(i.start) * size + i.end];
}

bool relation_holds(Rel r, const Interval& i, const Interval& j, const Semantics& s) {
  // The reflexive flavor weakens every strict comparison in the defining
  // conjunction to <=; equalities are untouched.
  auto lt = [&](int a, int b) { return s.flavor == Flavor::Irreflexive ? a < b : a <= b; };
  int x1 = i.start, y1 = i.end, x2 = j.start, y2 = j.end;
  switch (r) {
    case Rel::A:    return y1 == x2 && lt(x2, y2);
    case Rel::Abar: return y2 == x1 && lt(x2, y2);
    case Rel::B:    return x1 == x2 && lt(y2, y1);
    case Rel::Bbar: return x1 == x2 && lt(y1, y2);
    case Rel::E:    return lt(x1, x2) && y1 == y2;
    case Rel::Ebar: return lt(x2, x1) && y1 == y2;
    case Rel::D:    return lt(x1, x2) && lt(y2, y1);
    case Rel::Dbar: return lt(x2, x1) && lt(y1, y2);
    case Rel::L:    return lt(y1, x2);
    case Rel::Lbar: return lt(y2, x1);
    case Rel::O:    return lt(x1, x2) && lt(x2, y1) && lt(y1, y2);
    case Rel::Obar: return lt(x2, x1) && lt(x1, y2) && lt(y2, y1);
  }
  return false;
}

std::vector<Interval> successors(const FiniteFrame& f, const Interval& i, Rel r) {
  std::vector<Interval> out;
  for (const auto& j : f.intervals())
    if (relation_holds(r, i, j, f.sem)) out.push_back(j);
  return out;
}

bool FiniteModel::holds(const std::string& var, const Interval& i) const {
  auto it = valuation.find(var);
  return it != valuation.end() && it->second.count(i) > 0;
}

bool eval(const FiniteModel& m, const Interval& at, const syntax::ExprPtr& e) {
  using syntax::Kind;
  switch (e->kind) {
    case Kind::True:
      return true;
    case Kind::False:
      return false;
    case Kind::Var:
      return m.holds(e->var, at);
    case Kind::Dia: {
      for (const auto& j : m.frame.intervals())
        if (relation_holds(e->rel, at, j, m.frame.sem) && eval(m, j, e->arg)) return true;
      return false;
    }
    case Kind::Box: {
      for (const auto& j : m.frame.intervals())
        if (relation_holds(e->rel, at, j, m.frame.sem) && !eval(m, j, e->arg)) return false;
      return true;
    }
    case Kind::And: {
      for (const auto& p : e->parts)
        if (!eval(m, at, p)) return false;
      return true;
    }
    // The extended surface forms are supported so that desugaring can be
    // cross-checked against direct evaluation.
    case Kind::Or: {
      for (const auto& p : e->parts)
        if (eval(m, at, p)) return true;
      return false;
    }
    case Kind::Not:
      return !eval(m, at, e->arg);
    case Kind::Impl: {
      for (const auto& p : e->parts)
        if (!eval(m, at, p)) return true;
      return eval(m, at, e->head);
    }
  }
  return false;
}

bool eval_clause(const FiniteModel& m, const syntax::Clause& c) {
  for (const auto& w : m.frame.intervals()) {
    bool body = true;
    for (const auto& b : c.body)
      if (!eval(m, w, b)) {
        body = false;
        break;
      }
    if (body && !eval(m, w, c.head)) return false;
  }
  return true;
}

bool eval_formula_at(const FiniteModel& m, const Interval& at, const syntax::Formula& f) {
  for (const auto& init : f.initials)
    if (!eval(m, at, init)) return false;
  for (const auto& c : f.clauses)
    if (!eval_clause(m, c)) return false;
  return true;
}

std::optional<Interval> model_satisfies(const FiniteModel& m, const syntax::Formula& f) {
  for (const auto& c : f.clauses)
    if (!eval_clause(m, c)) return std::nullopt;
  for (int x = 0; x < m.frame.size; ++x)
    for (int y = x; y < m.frame.size; ++y) {
      Interval w{x, y};
      if (!m.frame.contains(w)) continue;
      bool ok = true;
      for (const auto& init : f.initials)
        if (!eval(m, w, init)) {
          ok = false;
          break;
        }
      if (ok) return w;
    }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Model files

namespace {

void strip(std::string& s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  s.erase(0, i);
}

}  // namespace

FiniteModel read_model(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::optional<int> size;
  std::optional<Flavor> flavor;
  std::optional<bool> strict;
  std::vector<std::pair<std::string, std::vector<Interval>>> vals;

  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    strip(line);
    if (line.empty()) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw ModelIoError("line " + std::to_string(lineno) + ": expected 'key: value'");
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    strip(key);
    strip(value);
    if (key == "order") {
      std::istringstream vs(value);
      std::string word;
      int n;
      if (!(vs >> word >> n) || word != "chain" || n <= 0)
        throw ModelIoError("line " + std::to_string(lineno) + ": expected 'chain <N>'");
      size = n;
    } else if (key == "semantics") {
      if (value == "refl")
        flavor = Flavor::Reflexive;
      else if (value == "irrefl")
        flavor = Flavor::Irreflexive;
      else
        throw ModelIoError("line " + std::to_string(lineno) + ": semantics must be refl|irrefl");
    } else if (key == "strict") {
      if (value == "true")
        strict = true;
      else if (value == "false")
        strict = false;
      else
        throw ModelIoError("line " + std::to_string(lineno) + ": strict must be true|false");
    } else if (key.rfind("val ", 0) == 0) {
      std::string var = key.substr(4);
      strip(var);
      if (var.empty())
        throw ModelIoError("line " + std::to_string(lineno) + ": missing variable name");
      std::vector<Interval> ivs;
      std::istringstream vs(value);
      char c;
      while (vs >> c) {
        int x, y;
        char comma, close;
        if (c != '(' || !(vs >> x >> comma >> y >> close) || comma != ',' || close != ')')
          throw ModelIoError("line " + std::to_string(lineno) + ": expected (x,y) pairs");
        ivs.push_back(Interval{x, y});
      }
      vals.emplace_back(std::move(var), std::move(ivs));
    } else {
      throw ModelIoError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!size) throw ModelIoError("missing 'order: chain <N>'");
  FiniteModel m;
  m.frame = FiniteFrame(*size, Semantics{flavor.value_or(Flavor::Irreflexive),
                                         strict.value_or(false)});
  for (auto& [var, ivs] : vals)
    for (auto& iv : ivs) {
      if (!m.frame.contains(iv))
        throw ModelIoError("interval " + to_string(iv) + " for '" + var +
                           "' is outside the frame");
      m.valuation[var].insert(iv);
    }
  return m;
}

std::string write_model(const FiniteModel& m) {
  std::ostringstream os;
  os << "order: chain " << m.frame.size << "\n";
  os << "semantics: " << (m.frame.sem.flavor == Flavor::Reflexive ? "refl" : "irrefl") << "\n";
  os << "strict: " << (m.frame.sem.strict ? "true" : "false") << "\n";
  for (const auto& [var, ivs] : m.valuation) {
    os << "val " << var << ":";
    for (const auto& iv : ivs) os << " (" << iv.start << "," << iv.end << ")";
    os << "\n";
  }
  return os.str();
}

}  // namespace hornhs::semantics

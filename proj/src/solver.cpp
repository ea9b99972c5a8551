#include "hornhs/solver.hpp"

#include <sstream>

namespace hornhs::solver {

using semantics::Flavor;
using syntax::Kind;

ZoneClosure zone_closure(const syntax::Formula& f, const ZoneFrame& zf) {
  ZoneClosure zc;
  zc.index = closure::index_box_horn(f);
  zc.result = closure::close(zc.index, zf.graph, zf.seed_zone);
  long bound = static_cast<long>(zf.zone_count()) * zc.index.occurrence_count;
  if (zc.result.rule_applications > bound)
    throw std::logic_error("zone closure exceeded the |Z|*|phi| application bound");
  return zc;
}

Verdict decide(const syntax::Formula& f, OrderClass cls, const Semantics& sem) {
  Verdict v;
  v.kind = VerdictKind::Unsupported;
  if (sem.strict) {
    v.reason = "strict semantics is not covered by the zone construction";
    return v;
  }
  for (auto& i : f.initials)
    if (!syntax::is_literal(i)) throw std::invalid_argument("decide requires a desugared formula");
  for (auto& c : f.clauses) {
    for (auto& b : c.body)
      if (!syntax::is_literal(b))
        throw std::invalid_argument("decide requires a desugared formula");
    if (!syntax::is_literal(c.head))
      throw std::invalid_argument("decide requires a desugared formula");
  }
  bool has_dia = false;
  for (auto& i : f.initials) has_dia |= syntax::contains_dia(i);
  for (auto& c : f.clauses) {
    for (auto& b : c.body) has_dia |= syntax::contains_dia(b);
    has_dia |= syntax::contains_dia(c.head);
  }
  if (has_dia) {
    v.reason = "diamond operators remain after desugaring; only box-Horn input is decidable here";
    return v;
  }
  if (!zones::combination_supported(cls, sem)) {
    if (sem.flavor == Flavor::Irreflexive &&
        (cls == OrderClass::Dis || cls == OrderClass::Fin))
      v.reason = std::string("box-Horn satisfiability over ") +
                 zones::order_class_name(cls) +
                 "(<) is undecidable; no zone construction exists";
    else
      v.reason = std::string("no zone construction for ") + zones::order_class_name(cls) +
                 "(<)";
    return v;
  }

  // Frames per class and flavor are formula-independent.
  static std::map<std::pair<int, int>, std::vector<ZoneFrame>> cache;
  auto key = std::make_pair(static_cast<int>(cls), static_cast<int>(sem.flavor));
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::vector<ZoneFrame> frames;
    for (const auto& cfg : zones::enumerate_section_configs(cls, sem))
      frames.push_back(zones::build_zone_frame(cfg, cls, sem));
    it = cache.emplace(key, std::move(frames)).first;
  }

  for (const ZoneFrame& zf : it->second) {
    ZoneClosure zc = zone_closure(f, zf);
    v.rule_applications += zc.rule_applications();
    if (!zc.has_bottom()) {
      v.kind = VerdictKind::Sat;
      v.sat_config = zf.cfg;
      v.zone_model = extract_zone_model(zc, zf);
      v.sat_frame = zf;
      return v;
    }
  }
  v.kind = VerdictKind::Unsat;
  return v;
}

std::map<std::string, std::set<int>> extract_zone_model(const ZoneClosure& zc,
                                                        const ZoneFrame& zf) {
  if (zc.has_bottom())
    throw std::invalid_argument("extract_zone_model after bottom was derived");
  std::map<std::string, std::set<int>> out;
  for (int id : zc.index.var_ids())
    for (int z = 0; z < zf.zone_count(); ++z)
      if (zc.result.holds(id, z)) out[zc.index.literals[id]->var].insert(z);
  return out;
}

FiniteModel concretize(const std::map<std::string, std::set<int>>& zone_model,
                       const ZoneFrame& zf, int k) {
  zones::Representative rep = zones::representative_order(zf.cfg, zf.sem, k);
  FiniteModel m;
  m.frame = rep.frame;
  for (const auto& iv : rep.frame.intervals()) {
    int z = zones::zone_of_interval(zf, rep, iv);
    for (const auto& [var, zs] : zone_model)
      if (zs.count(z)) m.valuation[var].insert(iv);
  }
  return m;
}

std::string render_zone_model(const std::map<std::string, std::set<int>>& zone_model,
                              const ZoneFrame& zf) {
  std::ostringstream os;
  for (const auto& [var, zs] : zone_model) {
    os << "val " << var << ":";
    for (int z : zs) os << " " << zf.zone_name(z);
    os << "\n";
  }
  return os.str();
}

}  // namespace hornhs::solver

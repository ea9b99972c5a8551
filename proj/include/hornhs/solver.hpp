#pragma once

#include <map>
#include <set>

#include "hornhs/zones.hpp"

namespace hornhs::solver {

using semantics::FiniteModel;
using semantics::Semantics;
using zones::OrderClass;
using zones::SectionConfig;
using zones::ZoneFrame;

struct ZoneClosure {
  closure::IndexedFormula index;
  closure::ClosureResult result;

  bool has_bottom() const { return result.bottom; }
  long rule_applications() const { return result.rule_applications; }
};

// Least fixpoint of the zone closure rules, initial conditions seeded at the
// frame's seed zone. Asserts the |Z|*|phi| bound on rule applications.
ZoneClosure zone_closure(const syntax::Formula& f, const ZoneFrame& zf);

enum class VerdictKind : std::uint8_t { Sat, Unsat, Unsupported };

struct Verdict {
  VerdictKind kind;
  std::string reason;                               // Unsupported
  std::optional<SectionConfig> sat_config;          // Sat
  std::optional<ZoneFrame> sat_frame;               // Sat
  std::map<std::string, std::set<int>> zone_model;  // Sat: variable -> zones
  long rule_applications = 0;                       // summed over configurations
};

// f must be desugared. Enumerates the section configurations of the class
// and reports Sat on the first bottom-free zone closure.
Verdict decide(const syntax::Formula& f, OrderClass cls, const Semantics& sem);

std::map<std::string, std::set<int>> extract_zone_model(const ZoneClosure& zc,
                                                        const ZoneFrame& zf);

// Pulls a zone model back through the interval-to-zone map of a
// representative chain.
FiniteModel concretize(const std::map<std::string, std::set<int>>& zone_model,
                       const ZoneFrame& zf, int k);

std::string render_zone_model(const std::map<std::string, std::set<int>>& zone_model,
                              const ZoneFrame& zf);

}  // namespace hornhs::solver

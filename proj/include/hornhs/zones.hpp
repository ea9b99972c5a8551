#pragma once

#include <string>
#include <vector>

#include "hornhs/closure.hpp"
#include "hornhs/semantics.hpp"

namespace hornhs::zones {

using semantics::FiniteFrame;
using semantics::Flavor;
using semantics::Interval;
using semantics::Semantics;
using syntax::Rel;

enum class OrderClass : std::uint8_t { Lin, Fin, Dis, Den };

const char* order_class_name(OrderClass c);
std::optional<OrderClass> order_class_from_name(const std::string& s);

// Which of the open sections around the seed interval are nonempty. The two
// point sections [a,a] and [b,b] always exist.
struct SectionConfig {
  bool seed_equal = false;  // a = b
  bool left = false;        // (-inf, a)
  bool mid = false;         // (a, b), only when a < b
  bool right = false;       // (b, inf) / (a, inf)

  std::string name() const;
  bool operator==(const SectionConfig&) const = default;
};

enum class SectionKind : std::uint8_t { Open, Point };

struct Section {
  SectionKind kind;
  std::string token;  // "(-inf,a)", "[a]", "(a,b)", "[b]", "(b,inf)", "(a,inf)"
};

std::vector<Section> sections_of(const SectionConfig& cfg);

struct Zone {
  enum class Kind : std::uint8_t { Pair, Off, Punct } kind;
  int s1 = -1;
  int s2 = -1;  // Pair only; mirrors s1 otherwise

  bool operator==(const Zone&) const = default;
};

struct UnsupportedCombination : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool combination_supported(OrderClass cls, const Semantics& sem);

// A finite chain realizing the nonempty sections, each chain position tagged
// with its section. Dense classes can be refined: every base point keeps
// fresh neighbours on both sides inside its open section.
struct Representative {
  FiniteFrame frame;
  std::vector<int> section_of;  // per chain position
  int pos_a = -1, pos_b = -1;
  std::vector<int> base_positions;  // positions carried over from the unrefined chain

  Interval seed() const { return Interval{pos_a, pos_b}; }
};

Representative representative_order(const SectionConfig& cfg, const Semantics& sem, int k,
                                    int refine_depth = 0);

struct ZoneFrame {
  SectionConfig cfg;
  OrderClass cls = OrderClass::Den;
  Semantics sem;
  std::vector<Section> sections;
  std::vector<Zone> zones;
  closure::WorldGraph graph{0};
  int seed_zone = -1;

  int zone_count() const { return static_cast<int>(zones.size()); }
  std::string zone_name(int z) const;
  int find_zone(const Zone& z) const;
  bool related(Rel r, int z1, int z2) const {
    return graph.succ[static_cast<int>(r)][z1].test(z2);
  }
};

// Zones per the case split, with accessibility derived existentially from a
// representative chain (midpoint-refined for dense classes).
ZoneFrame build_zone_frame(const SectionConfig& cfg, OrderClass cls, const Semantics& sem,
                           int k = 3);
// Same construction without the supported-combination guard; used to exhibit
// the failures on unsupported combinations.
ZoneFrame build_zone_frame_unchecked(const SectionConfig& cfg, OrderClass cls,
                                     const Semantics& sem, int k = 3);

// All realizable flag combinations for the class, deduplicated up to
// seed-preserving frame isomorphism.
std::vector<SectionConfig> enumerate_section_configs(OrderClass cls, const Semantics& sem);

int zone_of_interval(const ZoneFrame& zf, const Representative& rep, const Interval& i);

struct PmorphismViolation {
  int condition;  // 1 or 2
  Rel rel;
  int zone_src, zone_tgt;
  Interval stranded;  // (p2): base interval with no witness
};

struct PmorphismReport {
  std::vector<PmorphismViolation> violations;
  long pairs_checked = 0;
};

PmorphismReport verify_pmorphism(const SectionConfig& cfg, OrderClass cls,
                                 const Semantics& sem, int k);

// Zone uniformity: closure labels on the representative must be
// constant across every zone. Returns the offending (literal, zone) pairs.
struct UniformityViolation {
  std::string literal;
  int zone;
};
std::vector<UniformityViolation> zone_uniformity_violations(const syntax::Formula& f,
                                                            const SectionConfig& cfg,
                                                            OrderClass cls,
                                                            const Semantics& sem, int k);

bool zone_frames_isomorphic(const ZoneFrame& a, const ZoneFrame& b, bool pointed);

// Number of pairwise non-isomorphic (unpointed) zone frames over all
// realizable configurations of the class.
int isomorphism_class_count(OrderClass cls, const Semantics& sem);

std::string render_zone_table(const ZoneFrame& zf);

}  // namespace hornhs::zones

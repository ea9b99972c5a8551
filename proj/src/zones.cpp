#include "hornhs/zones.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "hornhs/oracle.hpp"

namespace hornhs::zones {

using semantics::relation_holds;

const char* order_class_name(OrderClass c) {
  switch (c) {
    case OrderClass::Lin: return "lin";
    case OrderClass::Fin: return "fin";
    case OrderClass::Dis: return "dis";
    case OrderClass::Den: return "den";
  }
  return "?";
}

std::optional<OrderClass> order_class_from_name(const std::string& s) {
  if (s == "lin") return OrderClass::Lin;
  if (s == "fin") return OrderClass::Fin;
  if (s == "dis") return OrderClass::Dis;
  if (s == "den") return OrderClass::Den;
  return std::nullopt;
}

std::string SectionConfig::name() const {
  std::string out = seed_equal ? "a=b:" : "a<b:";
  out += left ? 'L' : '-';
  if (!seed_equal) out += mid ? 'M' : '-';
  out += right ? 'R' : '-';
  return out;
}

std::vector<Section> sections_of(const SectionConfig& cfg) {
  std::vector<Section> out;
  if (cfg.left) out.push_back({SectionKind::Open, "(-inf,a)"});
  out.push_back({SectionKind::Point, "[a]"});
  if (cfg.seed_equal) {
    if (cfg.right) out.push_back({SectionKind::Open, "(a,inf)"});
  } else {
    if (cfg.mid) out.push_back({SectionKind::Open, "(a,b)"});
    out.push_back({SectionKind::Point, "[b]"});
    if (cfg.right) out.push_back({SectionKind::Open, "(b,inf)"});
  }
  return out;
}

bool combination_supported(OrderClass cls, const Semantics& sem) {
  if (sem.strict) return false;
  if (sem.flavor == Flavor::Reflexive) return true;  // Dis, Den, Lin, Fin
  return cls == OrderClass::Den;
}

Representative representative_order(const SectionConfig& cfg, const Semantics& sem, int k,
                                    int refine_depth) {
  if (k < 2) throw std::invalid_argument("representative_order requires k >= 2");
  auto secs = sections_of(cfg);
  Representative rep;
  int scale = 1 << refine_depth;
  int pos = 0;
  for (int s = 0; s < static_cast<int>(secs.size()); ++s) {
    if (secs[s].kind == SectionKind::Point) {
      rep.section_of.push_back(s);
      rep.base_positions.push_back(pos);
      if (secs[s].token == "[a]") rep.pos_a = pos;
      if (secs[s].token == "[b]") rep.pos_b = pos;
      ++pos;
    } else {
      // (k+1)*scale - 1 points; base point i sits at local index (i+1)*scale - 1,
      // so every base point keeps refined neighbours on both sides.
      int points = (k + 1) * scale - 1;
      for (int i = 0; i < points; ++i) {
        rep.section_of.push_back(s);
        if ((i + 1) % scale == 0 && (i + 1) / scale <= k) rep.base_positions.push_back(pos);
        ++pos;
      }
    }
  }
  if (cfg.seed_equal) rep.pos_b = rep.pos_a;
  rep.frame = FiniteFrame(pos, Semantics{sem.flavor, false});
  return rep;
}

namespace {

std::vector<Zone> zone_inventory(const SectionConfig& cfg, const Semantics& sem) {
  auto secs = sections_of(cfg);
  int n = static_cast<int>(secs.size());
  std::vector<Zone> zones;
  if (sem.flavor == Flavor::Reflexive) {
    for (int s1 = 0; s1 < n; ++s1)
      for (int s2 = s1; s2 < n; ++s2) zones.push_back(Zone{Zone::Kind::Pair, s1, s2});
    return zones;
  }
  // Irreflexive: pair zones for distinct sections, pair zones for the point
  // sections (their only intervals are punctual), and off-diagonal plus
  // punctual zones for open sections.
  for (int s1 = 0; s1 < n; ++s1)
    for (int s2 = s1; s2 < n; ++s2) {
      if (s1 == s2 && secs[s1].kind != SectionKind::Point) continue;
      zones.push_back(Zone{Zone::Kind::Pair, s1, s2});
    }
  for (int s = 0; s < n; ++s)
    if (secs[s].kind == SectionKind::Open) zones.push_back(Zone{Zone::Kind::Off, s, s});
  for (int s = 0; s < n; ++s)
    if (secs[s].kind == SectionKind::Open) zones.push_back(Zone{Zone::Kind::Punct, s, s});
  return zones;
}

Zone classify_interval(const std::vector<Section>& secs, const std::vector<int>& section_of,
                       const Semantics& sem, const Interval& i) {
  int s1 = section_of[i.start];
  int s2 = section_of[i.end];
  if (sem.flavor == Flavor::Reflexive) return Zone{Zone::Kind::Pair, s1, s2};
  if (i.start == i.end)
    return secs[s1].kind == SectionKind::Point ? Zone{Zone::Kind::Pair, s1, s1}
                                               : Zone{Zone::Kind::Punct, s1, s1};
  if (s1 == s2) return Zone{Zone::Kind::Off, s1, s1};
  return Zone{Zone::Kind::Pair, s1, s2};
}

}  // namespace

std::string ZoneFrame::zone_name(int z) const {
  const Zone& zn = zones[z];
  switch (zn.kind) {
    case Zone::Kind::Pair:
      return "Z[" + sections[zn.s1].token + "][" + sections[zn.s2].token + "]";
    case Zone::Kind::Off:
      return "Zoff[" + sections[zn.s1].token + "]";
    case Zone::Kind::Punct:
      return "Zpt[" + sections[zn.s1].token + "]";
  }
  return "?";
}

int ZoneFrame::find_zone(const Zone& z) const {
  for (int i = 0; i < zone_count(); ++i)
    if (zones[i] == z) return i;
  return -1;
}

ZoneFrame build_zone_frame_unchecked(const SectionConfig& cfg, OrderClass cls,
                                     const Semantics& sem, int k) {
  ZoneFrame zf;
  zf.cfg = cfg;
  zf.cls = cls;
  zf.sem = Semantics{sem.flavor, false};
  zf.sections = sections_of(cfg);
  zf.zones = zone_inventory(cfg, zf.sem);
  zf.graph = closure::WorldGraph(zf.zone_count());

  // Accessibility is existential over a representative; dense classes get a
  // midpoint-refined chain so that witnesses needing up to four distinct
  // points per open section are present.
  int depth = cls == OrderClass::Den ? 1 : 0;
  Representative rep = representative_order(cfg, zf.sem, k, depth);
  const auto& ivs = rep.frame.intervals();
  std::vector<int> zone_of(ivs.size());
  for (size_t i = 0; i < ivs.size(); ++i)
    zone_of[i] = zf.find_zone(classify_interval(zf.sections, rep.section_of, zf.sem, ivs[i]));
  for (size_t i = 0; i < ivs.size(); ++i)
    for (size_t j = 0; j < ivs.size(); ++j)
      for (Rel r : syntax::all_relations())
        if (relation_holds(r, ivs[i], ivs[j], rep.frame.sem))
          zf.graph.add_edge(r, zone_of[i], zone_of[j]);

  int sa = rep.section_of[rep.pos_a];
  int sb = rep.section_of[rep.pos_b];
  zf.seed_zone = zf.find_zone(Zone{Zone::Kind::Pair, sa, sb});
  return zf;
}

ZoneFrame build_zone_frame(const SectionConfig& cfg, OrderClass cls, const Semantics& sem,
                           int k) {
  if (!combination_supported(cls, sem))
    throw UnsupportedCombination(std::string("no zone construction for ") +
                                 order_class_name(cls) +
                                 (sem.flavor == Flavor::Reflexive ? "(<=)" : "(<)"));
  return build_zone_frame_unchecked(cfg, cls, sem, k);
}

int zone_of_interval(const ZoneFrame& zf, const Representative& rep, const Interval& i) {
  return zf.find_zone(classify_interval(zf.sections, rep.section_of, zf.sem, i));
}

std::vector<SectionConfig> enumerate_section_configs(OrderClass cls, const Semantics& sem) {
  if (!combination_supported(cls, sem))
    throw UnsupportedCombination(std::string("no zone construction for ") +
                                 order_class_name(cls) +
                                 (sem.flavor == Flavor::Reflexive ? "(<=)" : "(<)"));
  std::vector<SectionConfig> all;
  for (int l = 0; l <= 1; ++l)
    for (int r = 0; r <= 1; ++r)
      all.push_back(SectionConfig{true, l != 0, false, r != 0});
  for (int l = 0; l <= 1; ++l)
    for (int m = 0; m <= 1; ++m)
      for (int r = 0; r <= 1; ++r) {
        if (cls == OrderClass::Den && m == 0) continue;  // density forces (a,b) nonempty
        all.push_back(SectionConfig{false, l != 0, m != 0, r != 0});
      }
  // Deduplicate up to seed-preserving isomorphism. Under the reflexive
  // semantics different configurations can yield isomorphic unpointed frames,
  // but merging those would lose seed placements and with them satisfiable
  // formulas, so the seed zone stays distinguished here.
  std::vector<SectionConfig> out;
  std::vector<ZoneFrame> kept;
  for (const auto& cfg : all) {
    ZoneFrame zf = build_zone_frame_unchecked(cfg, cls, sem, 3);
    bool dup = false;
    for (const auto& old : kept)
      if (zone_frames_isomorphic(old, zf, /*pointed=*/true)) {
        dup = true;
        break;
      }
    if (!dup) {
      out.push_back(cfg);
      kept.push_back(std::move(zf));
    }
  }
  return out;
}

PmorphismReport verify_pmorphism(const SectionConfig& cfg, OrderClass cls,
                                 const Semantics& sem, int k) {
  Semantics s{sem.flavor, false};
  ZoneFrame zf = build_zone_frame_unchecked(cfg, cls, s, k);
  Representative base = representative_order(cfg, s, k, 0);
  int witness_depth = cls == OrderClass::Den ? 3 : 0;
  Representative fine = representative_order(cfg, s, k, witness_depth);

  PmorphismReport rep;
  const auto& base_ivs = base.frame.intervals();
  std::vector<int> base_zone(base_ivs.size());
  for (size_t i = 0; i < base_ivs.size(); ++i)
    base_zone[i] = zone_of_interval(zf, base, base_ivs[i]);

  // (p1): every concrete pair must be matched at zone level.
  for (size_t i = 0; i < base_ivs.size(); ++i)
    for (size_t j = 0; j < base_ivs.size(); ++j)
      for (Rel r : syntax::all_relations()) {
        ++rep.pairs_checked;
        if (relation_holds(r, base_ivs[i], base_ivs[j], base.frame.sem) &&
            !zf.related(r, base_zone[i], base_zone[j]))
          rep.violations.push_back(
              PmorphismViolation{1, r, base_zone[i], base_zone[j], base_ivs[i]});
      }

  // (p2): every base interval of the source zone needs a witness; dense
  // classes may find it among the refined points.
  const auto& fine_ivs = fine.frame.intervals();
  std::vector<int> fine_zone(fine_ivs.size());
  for (size_t j = 0; j < fine_ivs.size(); ++j)
    fine_zone[j] = zone_of_interval(zf, fine, fine_ivs[j]);
  // Base chain position -> refined chain position.
  std::vector<int> embed(base.section_of.size());
  {
    std::vector<int> count_base(zf.sections.size(), 0);
    std::vector<std::vector<int>> fine_by_sec(zf.sections.size());
    for (size_t p = 0; p < fine.base_positions.size(); ++p)
      fine_by_sec[fine.section_of[fine.base_positions[p]]].push_back(
          fine.base_positions[p]);
    for (size_t p = 0; p < base.section_of.size(); ++p) {
      int sec = base.section_of[p];
      embed[p] = fine_by_sec[sec][count_base[sec]++];
    }
  }

  for (size_t i = 0; i < base_ivs.size(); ++i) {
    Interval fi{embed[base_ivs[i].start], embed[base_ivs[i].end]};
    for (Rel r : syntax::all_relations()) {
      for (int zt = 0; zt < zf.zone_count(); ++zt) {
        if (!zf.related(r, base_zone[i], zt)) continue;
        bool witness = false;
        for (size_t j = 0; j < fine_ivs.size(); ++j)
          if (fine_zone[j] == zt &&
              relation_holds(r, fi, fine_ivs[j], fine.frame.sem)) {
            witness = true;
            break;
          }
        if (!witness)
          rep.violations.push_back(PmorphismViolation{2, r, base_zone[i], zt, base_ivs[i]});
      }
    }
  }
  return rep;
}

std::vector<UniformityViolation> zone_uniformity_violations(const syntax::Formula& f,
                                                            const SectionConfig& cfg,
                                                            OrderClass cls,
                                                            const Semantics& sem, int k) {
  Semantics s{sem.flavor, false};
  ZoneFrame zf = build_zone_frame_unchecked(cfg, cls, s, k);
  Representative rep = representative_order(cfg, s, k, 0);
  auto ls = oracle::closure_finite(f, rep.frame, rep.seed());

  std::vector<UniformityViolation> out;
  const auto& ivs = rep.frame.intervals();
  for (size_t lit = 0; lit < ls.index.literals.size(); ++lit) {
    std::vector<int> seen(zf.zone_count(), -1);  // -1 unseen, else 0/1
    for (size_t i = 0; i < ivs.size(); ++i) {
      int z = zone_of_interval(zf, rep, ivs[i]);
      int val = ls.result.facts[lit].test(static_cast<int>(i)) ? 1 : 0;
      if (seen[z] == -1) {
        seen[z] = val;
      } else if (seen[z] != val) {
        out.push_back(UniformityViolation{syntax::render(ls.index.literals[lit]), z});
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Isomorphism

namespace {

std::vector<std::vector<int>> node_signatures(const ZoneFrame& zf) {
  int n = zf.zone_count();
  std::vector<std::vector<int>> sig(n);
  for (int x = 0; x < n; ++x)
    for (int r = 0; r < syntax::kRelCount; ++r) {
      int out = zf.graph.succ[r][x].count();
      int in = 0;
      for (int y = 0; y < n; ++y)
        if (zf.graph.succ[r][y].test(x)) ++in;
      sig[x].push_back(out);
      sig[x].push_back(in);
      sig[x].push_back(zf.graph.succ[r][x].test(x) ? 1 : 0);
    }
  return sig;
}

struct IsoSearch {
  const ZoneFrame& a;
  const ZoneFrame& b;
  int n;
  std::vector<int> map_ab;
  std::vector<bool> used_b;
  std::vector<std::vector<int>> sig_a, sig_b;

  bool compatible(int x, int y) const {
    if (sig_a[x] != sig_b[y]) return false;
    for (int r = 0; r < syntax::kRelCount; ++r) {
      for (int x2 = 0; x2 < n; ++x2) {
        if (map_ab[x2] < 0) continue;
        bool e1 = a.graph.succ[r][x].test(x2);
        bool e2 = b.graph.succ[r][y].test(map_ab[x2]);
        if (e1 != e2) return false;
        e1 = a.graph.succ[r][x2].test(x);
        e2 = b.graph.succ[r][map_ab[x2]].test(y);
        if (e1 != e2) return false;
      }
      if (a.graph.succ[r][x].test(x) != b.graph.succ[r][y].test(y)) return false;
    }
    return true;
  }

  bool extend(int x) {
    if (x == n) return true;
    if (map_ab[x] >= 0) return extend(x + 1);
    for (int y = 0; y < n; ++y) {
      if (used_b[y]) continue;
      map_ab[x] = y;
      used_b[y] = true;
      if (compatible(x, y) && extend(x + 1)) return true;
      map_ab[x] = -1;
      used_b[y] = false;
    }
    return false;
  }
};

}  // namespace

bool zone_frames_isomorphic(const ZoneFrame& a, const ZoneFrame& b, bool pointed) {
  if (a.zone_count() != b.zone_count()) return false;
  IsoSearch s{a,
              b,
              a.zone_count(),
              std::vector<int>(a.zone_count(), -1),
              std::vector<bool>(a.zone_count(), false),
              node_signatures(a),
              node_signatures(b)};
  if (pointed) {
    s.map_ab[a.seed_zone] = b.seed_zone;
    s.used_b[b.seed_zone] = true;
    if (!s.compatible(a.seed_zone, b.seed_zone)) return false;
  }
  return s.extend(0);
}

int isomorphism_class_count(OrderClass cls, const Semantics& sem) {
  auto cfgs = enumerate_section_configs(cls, sem);
  std::vector<ZoneFrame> reps;
  for (const auto& cfg : cfgs) {
    ZoneFrame zf = build_zone_frame_unchecked(cfg, cls, sem, 3);
    bool dup = false;
    for (const auto& old : reps)
      if (zone_frames_isomorphic(old, zf, /*pointed=*/false)) {
        dup = true;
        break;
      }
    if (!dup) reps.push_back(std::move(zf));
  }
  return static_cast<int>(reps.size());
}

std::string render_zone_table(const ZoneFrame& zf) {
  std::ostringstream os;
  os << "# config " << zf.cfg.name() << " class " << order_class_name(zf.cls)
     << " semantics " << (zf.sem.flavor == Flavor::Reflexive ? "refl" : "irrefl") << "\n";
  os << "# zones " << zf.zone_count() << " seed " << zf.zone_name(zf.seed_zone) << "\n";
  for (Rel r : syntax::all_relations())
    for (int z1 = 0; z1 < zf.zone_count(); ++z1)
      for (int z2 = 0; z2 < zf.zone_count(); ++z2)
        if (zf.related(r, z1, z2))
          os << syntax::rel_name(r) << " " << zf.zone_name(z1) << " " << zf.zone_name(z2)
             << "\n";
  return os.str();
}

}  // namespace hornhs::zones

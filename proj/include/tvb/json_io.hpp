#pragma once

// JSON schemas for fans, filtrations, Chern data, incidence data, condition
// sets, configurations and verification reports. Output is canonical: fixed
// key order, two-space indentation, trailing newline.

#include "json.hpp"

#include <string>
#include <variant>

#include "tvb/chern.hpp"
#include "tvb/divisor.hpp"
#include "tvb/fan.hpp"
#include "tvb/incidence.hpp"
#include "tvb/klyachko.hpp"
#include "tvb/moduli.hpp"
#include "tvb/murphy_fan.hpp"

namespace tvb::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0";

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline Json parse(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

// Integers that fit in 64 bits are JSON numbers, larger ones decimal strings.
inline Json int_to_json(const Int& v) {
  if (v >= std::numeric_limits<long long>::min() && v <= std::numeric_limits<long long>::max())
    return static_cast<long long>(v);
  return v.str();
}

inline Int int_from_json(const Json& j) {
  if (j.is_number_integer()) return Int(j.get<long long>());
  if (j.is_string()) {
    Rat r = parse_rational(j.get<std::string>());
    if (boost::multiprecision::denominator(r) != 1) throw ParseError("expected an integer, got " + j.dump());
    return boost::multiprecision::numerator(r);
  }
  throw ParseError("expected an integer, got " + j.dump());
}

inline Json rat_to_json(const Rat& r) {
  if (boost::multiprecision::denominator(r) == 1) return int_to_json(boost::multiprecision::numerator(r));
  return to_string(r);
}

inline Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  throw ParseError("expected a rational number, got " + j.dump());
}

template <class Tag>
Json vector_to_json(const IntVector<Tag>& v) {
  Json a = Json::array();
  for (const auto& c : v.coords()) a.push_back(int_to_json(c));
  return a;
}

template <class Tag>
IntVector<Tag> vector_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an integer array, got " + j.dump());
  std::vector<Int> c;
  for (const auto& x : j) c.push_back(int_from_json(x));
  return IntVector<Tag>(std::move(c));
}

inline Json rayset_to_json(const RaySet& s) {
  Json a = Json::array();
  for (auto i : s) a.push_back(i);
  return a;
}

inline RaySet rayset_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an index array, got " + j.dump());
  RaySet s;
  for (const auto& x : j) {
    if (!x.is_number_unsigned()) throw ParseError("ray index must be a nonnegative integer");
    s.push_back(x.get<std::size_t>());
  }
  std::sort(s.begin(), s.end());
  return s;
}

template <class T>
T required(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ParseError(std::string("key '") + key + "' has the wrong type");
  }
}

inline const Json& required_node(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing key '") + key + "'");
  return j.at(key);
}

// ---------------------------------------------------------------------------
// Fan: {"dim": n, "rays": [[ints]], "max_cones": [[indices]]}

inline Json fan_to_json(const Fan& fan) {
  Json j;
  j["dim"] = fan.dim();
  j["rays"] = Json::array();
  for (const auto& r : fan.rays()) j["rays"].push_back(vector_to_json(r));
  j["max_cones"] = Json::array();
  for (const auto& c : fan.max_cones()) j["max_cones"].push_back(rayset_to_json(c));
  return j;
}

inline Fan fan_from_json(const Json& j) {
  const auto dim = required<std::size_t>(j, "dim");
  std::vector<LatticeVector> rays;
  for (const auto& r : required_node(j, "rays")) rays.push_back(vector_from_json<NTag>(r));
  const Json& cones = required_node(j, "max_cones");
  if (!cones.is_array()) throw ParseError("max_cones must be an array (lazy fans cannot be loaded)");
  std::vector<RaySet> max_cones;
  for (const auto& c : cones) max_cones.push_back(rayset_from_json(c));
  return Fan(dim, std::move(rays), std::move(max_cones));
}

/// Lazy Murphy fan: ray table plus the closed-form counts instead of cones.
inline Json lazy_murphy_fan_to_json(int n) {
  Json j;
  j["dim"] = n;
  std::vector<LatticeVector> rays;
  for (auto l : murphy_labels(n)) rays.push_back(label_vector(n, l));
  std::sort(rays.begin(), rays.end());
  j["rays"] = Json::array();
  for (const auto& r : rays) j["rays"].push_back(vector_to_json(r));
  j["max_cones"] = "lazy";
  j["ray_count"] = int_to_json(murphy_ray_count(n));
  j["max_cone_count"] = int_to_json(murphy_max_cone_count(n));
  return j;
}

// ---------------------------------------------------------------------------
// Incidence data: {"points": d, "lines": d', "incidences": [[i, j], ...]}

inline Json incidence_to_json(const IncidenceData& inc) {
  Json j;
  j["points"] = inc.points();
  j["lines"] = inc.lines();
  j["incidences"] = Json::array();
  for (const auto& [p, l] : inc.pairs()) j["incidences"].push_back(Json::array({p, l}));
  return j;
}

inline IncidenceData incidence_from_json(const Json& j) {
  std::vector<std::pair<int, int>> pairs;
  if (j.contains("incidences"))
    for (const auto& e : j.at("incidences")) {
      if (!e.is_array() || e.size() != 2) throw ParseError("incidence entries are [point, line] pairs");
      pairs.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
  return IncidenceData(required<int>(j, "points"), required<int>(j, "lines"), std::move(pairs));
}

// ---------------------------------------------------------------------------
// Condition set: {"points": d, "lines": d', "atoms": [{"kind", "i", "j"}]}

inline Json conditions_to_json(const ConditionSet& cs) {
  Json j;
  j["points"] = cs.points();
  j["lines"] = cs.lines();
  j["atoms"] = Json::array();
  for (const auto& a : cs.atoms()) {
    Json e;
    e["kind"] = to_string(a.kind);
    e["i"] = a.i;
    e["j"] = a.j;
    j["atoms"].push_back(std::move(e));
  }
  return j;
}

inline ConditionSet conditions_from_json(const Json& j) {
  std::vector<Atom> atoms;
  for (const auto& e : required_node(j, "atoms"))
    atoms.push_back(Atom{parse_atom_kind(required<std::string>(e, "kind")), required<int>(e, "i"), required<int>(e, "j")});
  return ConditionSet(required<int>(j, "points"), required<int>(j, "lines"), std::move(atoms));
}

// ---------------------------------------------------------------------------
// Fields: "Q" or "Fp:p".

using AnyField = std::variant<RationalField, PrimeField>;

inline AnyField field_from_string(const std::string& s) {
  if (s == "Q") return RationalField{};
  if (s.rfind("Fp:", 0) == 0) {
    try {
      return PrimeField(static_cast<std::uint32_t>(std::stoul(s.substr(3))));
    } catch (const std::logic_error&) {
      throw ParseError("bad field '" + s + "'");
    }
  }
  throw ParseError("field must be \"Q\" or \"Fp:<prime>\", got '" + s + "'");
}

template <class F>
Json element_to_json(const F& field, const typename F::value_type& v) {
  if constexpr (std::is_same_v<F, RationalField>) {
    return rat_to_json(v);
  } else {
    (void)field;
    return v;
  }
}

template <class F>
typename F::value_type element_from_json(const F& field, const Json& j) {
  return field.from_rat(rat_from_json(j));
}

// ---------------------------------------------------------------------------
// Configuration: {"field": "...", "points": [[x,y,z]], "lines": [[a,b,c]]}

template <class F>
Json configuration_to_json(const Configuration<F>& c) {
  Json j;
  j["field"] = c.field().name();
  for (const char* key : {"points", "lines"}) {
    Json arr = Json::array();
    for (const auto& t : std::string(key) == "points" ? c.points() : c.lines()) {
      Json e = Json::array();
      for (const auto& x : t) e.push_back(element_to_json(c.field(), x));
      arr.push_back(std::move(e));
    }
    j[key] = std::move(arr);
  }
  return j;
}

template <class F>
Configuration<F> configuration_from_json(const F& field, const Json& j) {
  auto triples = [&](const char* key) {
    std::vector<Triple<F>> out;
    for (const auto& e : required_node(j, key)) {
      if (!e.is_array() || e.size() != 3) throw ParseError("homogeneous coordinates must be triples");
      out.push_back({element_from_json(field, e[0]), element_from_json(field, e[1]), element_from_json(field, e[2])});
    }
    return out;
  };
  return Configuration<F>(field, triples("points"), triples("lines"));
}

// ---------------------------------------------------------------------------
// Filtration: {"rank": r, "field": "Q" | "Fp:p",
//              "rays": {"<ray index>": [{"jump": j, "basis": [[...]]}, ...]}}

template <class F>
Json filtration_to_json(const Filtration<F>& f) {
  Json j;
  j["rank"] = f.rank();
  j["field"] = f.field().name();
  j["rays"] = Json::object();
  for (const auto& [ray, steps] : f.rays()) {
    Json arr = Json::array();
    for (const auto& s : steps) {
      Json e;
      e["jump"] = int_to_json(s.jump);
      e["basis"] = Json::array();
      for (const auto& v : s.space.basis()) {
        Json row = Json::array();
        for (const auto& x : v) row.push_back(element_to_json(f.field(), x));
        e["basis"].push_back(std::move(row));
      }
      arr.push_back(std::move(e));
    }
    j["rays"][std::to_string(ray)] = std::move(arr);
  }
  return j;
}

template <class F>
Filtration<F> filtration_from_json(const F& field, const Json& j) {
  const auto rank = required<std::size_t>(j, "rank");
  Filtration<F> filt(field, rank);
  const Json& rays = required_node(j, "rays");
  if (!rays.is_object()) throw ParseError("'rays' must map ray indices to step lists");
  for (const auto& [key, steps_json] : rays.items()) {
    std::size_t ray = 0;
    try {
      ray = std::stoul(key);
    } catch (const std::logic_error&) {
      throw ParseError("ray key '" + key + "' is not an index");
    }
    typename Filtration<F>::Steps steps;
    for (const auto& e : steps_json) {
      Rows<F> vectors;
      for (const auto& row : required_node(e, "basis")) {
        Row<F> v;
        for (const auto& x : row) v.push_back(element_from_json(field, x));
        vectors.push_back(std::move(v));
      }
      steps.push_back({int_from_json(required_node(e, "jump")), Subspace<F>::span(field, rank, std::move(vectors))});
    }
    filt.set_ray(ray, std::move(steps));
  }
  return filt;
}

using AnyFiltration = std::variant<Filtration<RationalField>, Filtration<PrimeField>>;

inline AnyFiltration any_filtration_from_json(const Json& j) {
  AnyField field = field_from_string(required<std::string>(j, "field"));
  return std::visit([&](const auto& f) -> AnyFiltration { return filtration_from_json(f, j); }, field);
}

template <class F>
Json compatibility_to_json(const CompatibilityResult<F>& result, const F& field) {
  Json j;
  if (const auto* bad = std::get_if<Incompatible>(&result)) {
    j["compatible"] = false;
    j["cone"] = rayset_to_json(bad->cone);
    j["cell"] = Json::array();
    for (const auto& c : bad->cell) j["cell"].push_back(int_to_json(c));
    j["reason"] = bad->reason;
    return j;
  }
  const auto& ok = std::get<CharacterAssignment<F>>(result);
  j["compatible"] = true;
  j["cones"] = Json::array();
  for (const auto& s : ok.cones) {
    Json e;
    e["rays"] = rayset_to_json(s.cone);
    e["chars"] = Json::array();
    for (const auto& u : s.chars) e["chars"].push_back(vector_to_json(u));
    e["basis"] = Json::array();
    for (const auto& v : s.basis) {
      Json row = Json::array();
      for (const auto& x : v) row.push_back(element_to_json(field, x));
      e["basis"].push_back(std::move(row));
    }
    j["cones"].push_back(std::move(e));
  }
  return j;
}

// ---------------------------------------------------------------------------
// Chern data. Explicit: {"rank": r, "cones": [{"rays": [...], "chars": [[...]]}]}
// Rule: {"rule": "murphy", "incidence": {...}}

inline Json chern_to_json(const Fan& fan, const ChernDatum& c) {
  Json j;
  j["rank"] = c.rank;
  j["cones"] = Json::array();
  for (std::size_t k = 0; k < fan.max_cones().size(); ++k) {
    Json e;
    e["rays"] = rayset_to_json(fan.max_cones()[k]);
    e["chars"] = Json::array();
    for (const auto& u : c.chars.at(k)) e["chars"].push_back(vector_to_json(u));
    j["cones"].push_back(std::move(e));
  }
  return j;
}

inline ChernDatum chern_from_json(const Fan& fan, const Json& j) {
  ChernDatum c;
  c.rank = required<std::size_t>(j, "rank");
  std::map<RaySet, std::vector<Character>> by_cone;
  for (const auto& e : required_node(j, "cones")) {
    std::vector<Character> chars;
    for (const auto& u : required_node(e, "chars")) chars.push_back(vector_from_json<MTag>(u));
    by_cone[rayset_from_json(required_node(e, "rays"))] = std::move(chars);
  }
  for (const auto& cone : fan.max_cones()) {
    auto it = by_cone.find(cone);
    if (it == by_cone.end()) throw ParseError("Chern datum lacks maximal cone " + to_string(cone));
    c.chars.push_back(it->second);
  }
  return c;
}

inline Json murphy_rule_to_json(const IncidenceData& inc) {
  Json j;
  j["rule"] = "murphy";
  j["incidence"] = incidence_to_json(inc);
  return j;
}

inline Json signature_to_json(const Signature& s) {
  Json j = Json::array();
  for (const auto& [jump, dim] : s) {
    Json e;
    e["jump"] = int_to_json(jump);
    e["dim"] = dim;
    j.push_back(std::move(e));
  }
  return j;
}

// ---------------------------------------------------------------------------

inline Json verify_report_to_json(const IncidenceData& inc, const VerifyReport& r) {
  Json j;
  j["incidence"] = incidence_to_json(inc);
  j["field"] = "Fp:" + std::to_string(r.p);
  j["moduli_count"] = r.moduli_count;
  j["incidence_count"] = r.incidence_count;
  j["equal"] = r.equal;
  if (r.first_discrepancy) {
    j["first_discrepancy"] = configuration_to_json(*r.first_discrepancy);
    j["discrepancy_side"] = r.discrepancy_side;
  }
  return j;
}

inline Json support_function_to_json(const Fan& fan, const SupportFunction& s) {
  Json j;
  j["cartier"] = true;
  j["support_function"] = Json::array();
  for (std::size_t k = 0; k < s.local.size(); ++k) {
    Json e;
    e["cone"] = rayset_to_json(fan.max_cones()[k]);
    e["m"] = vector_to_json(s.local[k]);
    j["support_function"].push_back(std::move(e));
  }
  return j;
}

}  // namespace tvb::io

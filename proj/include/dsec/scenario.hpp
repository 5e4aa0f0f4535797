#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsec/fixtures.hpp"
#include "dsec/push.hpp"
#include "json.hpp"

namespace dsec {

using nlohmann::json;

// Invalid input: bad JSON shape, dangling reference, violated structural law.
struct ScenarioError : std::invalid_argument {
  ScenarioError(const std::string& where, const std::string& what) : std::invalid_argument(where + ": " + what) {}
};

// Field requested by the scenario ("q", "fp:<p>"); the driver stanza wins over the top level.
inline std::optional<std::string> scenario_field(const json& j) {
  if (j.contains("driver") && j["driver"].is_object() && j["driver"].contains("field")) return j["driver"]["field"].get<std::string>();
  if (j.contains("field")) return j["field"].get<std::string>();
  return std::nullopt;
}

namespace detail {

inline const json& need(const json& j, const std::string& key, const std::string& at) {
  if (!j.is_object() || !j.contains(key)) throw ScenarioError(at, "missing field '" + key + "'");
  return j[key];
}

inline std::string need_str(const json& j, const std::string& key, const std::string& at) {
  const auto& v = need(j, key, at);
  if (!v.is_string()) throw ScenarioError(at + "/" + key, "expected a string");
  return v.get<std::string>();
}

inline int need_int(const json& j, const std::string& at) {
  if (!j.is_number_integer()) throw ScenarioError(at, "expected an integer");
  return j.get<int>();
}

template <class T>
const T& lookup(const std::map<std::string, T>& m, const std::string& name, const std::string& kind, const std::string& at) {
  auto it = m.find(name);
  if (it == m.end()) throw ScenarioError(at, "unknown " + kind + " '" + name + "'");
  return it->second;
}

inline int index_of(const std::vector<std::string>& names, const std::string& n, const std::string& what, const std::string& at) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == n) return int(i);
  throw ScenarioError(at, "unknown " + what + " '" + n + "'");
}

template <class K>
K scalar(const json& v, const std::string& at) {
  try {
    if (v.is_number_integer()) return FieldTraits<K>::from_ratio(v.get<long long>(), 1);
    if (v.is_string()) return parse_scalar<K>(v.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(at, e.what());
  }
  throw ScenarioError(at, "expected an integer or a \"p/q\" string");
}

// Row-major entry list.
template <class K>
Matrix<K> matrix(const json& v, int rows, int cols, const std::string& at) {
  if (!v.is_array()) throw ScenarioError(at, "expected a row-major entry list");
  if (int(v.size()) != rows * cols)
    throw ScenarioError(at, "expected " + std::to_string(rows * cols) + " entries for a " + std::to_string(rows) + "x" +
                                std::to_string(cols) + " matrix, got " + std::to_string(v.size()));
  Matrix<K> m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = scalar<K>(v[r * cols + c], at + "/" + std::to_string(r * cols + c));
  return m;
}

inline int degree_key(const std::string& s, const std::string& at) {
  try {
    std::size_t used = 0;
    int n = std::stoi(s, &used);
    if (used == s.size()) return n;
  } catch (const std::logic_error&) {
  }
  throw ScenarioError(at, "degree key '" + s + "' is not an integer");
}

}  // namespace detail

template <class K>
struct Scenario {
  std::string field;
  std::map<std::string, Cat> cats;
  std::map<std::string, FinStar> finstars;
  std::map<std::string, Cx<K>> complexes;
  std::map<std::string, FinFunctor> functors;
  std::map<std::string, ChainOpfib<K>> opfibs;
  std::map<std::string, CatFamily> families;
  std::map<std::string, std::pair<std::string, ChainSection<K>>> sections;  // opfibration name, section
  std::map<std::string, Presection<K>> presections;
  std::map<std::string, bool> embedded;  // presection came straight from a strict section
  json driver;
};

template <class K>
Cx<K> load_complex(const json& j, const std::string& at) {
  int lo = j.contains("lo") ? detail::need_int(j["lo"], at + "/lo") : 0;
  const auto& dj = detail::need(j, "dims", at);
  if (!dj.is_array()) throw ScenarioError(at + "/dims", "expected a list of dimensions");
  std::vector<int> dims;
  for (std::size_t i = 0; i < dj.size(); ++i) {
    int d = detail::need_int(dj[i], at + "/dims/" + std::to_string(i));
    if (d < 0) throw ScenarioError(at + "/dims/" + std::to_string(i), "negative dimension");
    dims.push_back(d);
  }
  auto dim = [&](int n) { return (n < lo || n >= lo + int(dims.size())) ? 0 : dims[n - lo]; };
  std::map<int, Matrix<K>> d;
  if (j.contains("d")) {
    if (!j["d"].is_object()) throw ScenarioError(at + "/d", "expected an object keyed by degree");
    for (auto& [key, v] : j["d"].items()) {
      int n = detail::degree_key(key, at + "/d");
      d[n] = detail::matrix<K>(v, dim(n - 1), dim(n), at + "/d/" + key);
    }
  }
  try {
    auto c = make_complex<K>(lo, dims, d);
    validate(*c);
    return c;
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(at, e.what());
  }
}

inline Cat load_category(const json& j, const std::string& at, std::optional<FinStar>& fs) {
  if (j.contains("finstar")) {
    int N = detail::need_int(j["finstar"], at + "/finstar");
    try {
      fs = finstar(N);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(at + "/finstar", e.what());
    }
    return fs->cat;
  }
  const auto& oj = detail::need(j, "objects", at);
  if (!oj.is_array() || oj.empty()) throw ScenarioError(at + "/objects", "expected a nonempty list of names");
  std::vector<std::string> objs;
  for (auto& o : oj) objs.push_back(o.get<std::string>());
  if (j.contains("less")) {
    std::vector<std::pair<int, int>> rel;
    for (std::size_t i = 0; i < j["less"].size(); ++i) {
      auto w = at + "/less/" + std::to_string(i);
      const auto& p = j["less"][i];
      if (!p.is_array() || p.size() != 2) throw ScenarioError(w, "expected a pair [a, b]");
      rel.push_back({detail::index_of(objs, p[0], "object", w), detail::index_of(objs, p[1], "object", w)});
    }
    try {
      return poset(int(objs.size()), rel, objs);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(at + "/less", e.what());
    }
  }
  // explicit table; identities may be omitted
  std::vector<std::string> names;
  std::vector<int> src, tgt;
  std::vector<int> ident(objs.size(), -1);
  if (j.contains("morphisms"))
    for (std::size_t i = 0; i < j["morphisms"].size(); ++i) {
      auto w = at + "/morphisms/" + std::to_string(i);
      const auto& m = j["morphisms"][i];
      names.push_back(detail::need_str(m, "id", w));
      src.push_back(detail::index_of(objs, detail::need_str(m, "src", w), "object", w));
      tgt.push_back(detail::index_of(objs, detail::need_str(m, "tgt", w), "object", w));
    }
  for (std::size_t i = 0; i + 1 < names.size(); ++i)
    for (std::size_t k = i + 1; k < names.size(); ++k)
      if (names[i] == names[k]) throw ScenarioError(at + "/morphisms", "duplicate morphism id '" + names[i] + "'");
  if (j.contains("identities"))
    for (auto& [o, m] : j["identities"].items()) {
      auto w = at + "/identities/" + o;
      int a = detail::index_of(objs, o, "object", w);
      ident[a] = detail::index_of(names, m.get<std::string>(), "morphism", w);
    }
  for (std::size_t a = 0; a < objs.size(); ++a)
    if (ident[a] < 0) {
      ident[a] = int(names.size());
      names.push_back("id_" + objs[a]);
      src.push_back(int(a));
      tgt.push_back(int(a));
    }
  int n = int(names.size());
  std::vector<std::vector<int>> comp(n, std::vector<int>(n, -1));
  for (int f = 0; f < n; ++f) {
    comp[ident[tgt[f]]][f] = f;
    comp[f][ident[src[f]]] = f;
  }
  if (j.contains("compose"))
    for (std::size_t i = 0; i < j["compose"].size(); ++i) {
      auto w = at + "/compose/" + std::to_string(i);
      const auto& t = j["compose"][i];
      if (!t.is_array() || t.size() != 3) throw ScenarioError(w, "expected [g, f, g∘f]");
      int g = detail::index_of(names, t[0], "morphism", w), f = detail::index_of(names, t[1], "morphism", w);
      int gf = detail::index_of(names, t[2], "morphism", w);
      if (tgt[f] != src[g]) throw ScenarioError(w, "morphisms are not composable");
      comp[g][f] = gf;
    }
  auto c = make_category(objs, names, src, tgt, ident, comp);
  auto bad = check_category(*c);
  if (!bad.empty()) throw ScenarioError(at, bad.front());
  return c;
}

template <class K>
FinFunctor load_functor(const Scenario<K>& S, const json& j, const std::string& at) {
  auto src = detail::lookup(S.cats, detail::need_str(j, "source", at), "category", at + "/source");
  auto tgt = detail::lookup(S.cats, detail::need_str(j, "target", at), "category", at + "/target");
  const auto& oj = detail::need(j, "objects", at);
  std::vector<int> obj(src->nobj(), -1);
  for (auto& [k, v] : oj.items()) {
    auto w = at + "/objects/" + k;
    obj[detail::index_of(src->obj_names, k, "object", w)] = detail::index_of(tgt->obj_names, v.template get<std::string>(), "object", w);
  }
  for (int a = 0; a < src->nobj(); ++a)
    if (obj[a] < 0) throw ScenarioError(at + "/objects", "no image for object '" + src->obj_names[a] + "'");
  FinFunctor F;
  if (j.contains("morphisms")) {
    F = FinFunctor{src, tgt, obj, std::vector<int>(src->nmor(), -1)};
    for (int a = 0; a < src->nobj(); ++a) F.mor[src->ident[a]] = tgt->ident[obj[a]];
    for (auto& [k, v] : j["morphisms"].items()) {
      auto w = at + "/morphisms/" + k;
      F.mor[detail::index_of(src->mor_names, k, "morphism", w)] = detail::index_of(tgt->mor_names, v.template get<std::string>(), "morphism", w);
    }
    for (int f = 0; f < src->nmor(); ++f)
      if (F.mor[f] < 0) throw ScenarioError(at + "/morphisms", "no image for morphism '" + src->mor_names[f] + "'");
  } else {
    try {
      F = functor_on_objects(src, tgt, obj);
    } catch (const std::invalid_argument&) {
      throw ScenarioError(at, "morphism images are required unless the target homs on the image are singletons");
    }
  }
  auto bad = check_functor(F);
  if (!bad.empty()) throw ScenarioError(at, bad.front());
  return F;
}

template <class K>
void load_opfibration(Scenario<K>& S, const std::string& name, const json& j, const std::string& at) {
  std::string kind = j.contains("kind") ? j["kind"].get<std::string>() : "chain";
  if (kind == "cat") {
    CatFamily E;
    E.base = detail::lookup(S.cats, detail::need_str(j, "base", at), "category", at + "/base");
    const auto& fj = detail::need(j, "fibers", at);
    E.fiber.assign(E.base->nobj(), nullptr);
    for (auto& [o, c] : fj.items()) {
      auto w = at + "/fibers/" + o;
      E.fiber[detail::index_of(E.base->obj_names, o, "object", w)] = detail::lookup(S.cats, c.template get<std::string>(), "category", w);
    }
    for (int a = 0; a < E.base->nobj(); ++a)
      if (!E.fiber[a]) throw ScenarioError(at + "/fibers", "no fiber over '" + E.base->obj_names[a] + "'");
    E.trans.resize(E.base->nmor());
    for (int a = 0; a < E.base->nobj(); ++a) E.trans[E.base->ident[a]] = identity_functor(E.fiber[a]);
    std::vector<bool> seen(E.base->nmor(), false);
    if (j.contains("transitions"))
      for (auto& [m, fn] : j["transitions"].items()) {
        auto w = at + "/transitions/" + m;
        int f = detail::index_of(E.base->mor_names, m, "morphism", w);
        E.trans[f] = detail::lookup(S.functors, fn.template get<std::string>(), "functor", w);
        seen[f] = true;
      }
    for (int f = 0; f < E.base->nmor(); ++f)
      if (!seen[f] && !E.base->is_identity(f)) throw ScenarioError(at + "/transitions", "no transition along '" + E.base->mor_names[f] + "'");
    auto bad = check_family(E);
    if (!bad.empty()) throw ScenarioError(at, bad.front());
    S.families[name] = E;
    return;
  }
  if (kind != "chain") throw ScenarioError(at + "/kind", "expected \"cat\" or \"chain\"");
  if (j.contains("pullback")) {
    const auto& E = detail::lookup(S.opfibs, j["pullback"].get<std::string>(), "opfibration", at + "/pullback");
    const auto& F = detail::lookup(S.functors, detail::need_str(j, "along", at), "functor", at + "/along");
    if (F.tgt.get() != E.base.get()) throw ScenarioError(at, "functor target is not the opfibration base");
    S.opfibs[name] = pullback(F, E);
    return;
  }
  auto base_name = detail::need_str(j, "base", at);
  auto base = detail::lookup(S.cats, base_name, "category", at + "/base");
  auto tr = detail::need_str(j, "transitions", at);
  if (tr == "constant") {
    S.opfibs[name] = constant_opfib<K>(base);
  } else if (tr == "twist") {
    auto V = detail::lookup(S.complexes, detail::need_str(j, "complex", at), "complex", at + "/complex");
    const auto& gj = detail::need(j, "grade", at);
    std::vector<int> g(base->nobj(), 0);
    for (auto& [o, v] : gj.items()) g[detail::index_of(base->obj_names, o, "object", at + "/grade")] = detail::need_int(v, at + "/grade/" + o);
    try {
      S.opfibs[name] = twist_opfib<K>(base, g, V);
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(at + "/grade", e.what());
    }
  } else if (tr == "mtensor") {
    auto it = S.finstars.find(base_name);
    if (it == S.finstars.end()) throw ScenarioError(at + "/base", "mtensor needs a finstar base");
    S.opfibs[name] = mtensor_opfib<K>(it->second);
  } else {
    throw ScenarioError(at + "/transitions", "expected constant, twist or mtensor");
  }
}

// Slot keys: arity-1 values share key 1 (twist extras sit far above);
// tensor fibers need distinct keys per slot.
inline std::int64_t slot_key(const ChainKind kind, int obj, int slot) {
  if (kind == ChainKind::MTensor || kind == ChainKind::Pullback) return algebra_key(obj, slot);
  return 1;
}

template <class K>
ChainSection<K> load_explicit_section(const Scenario<K>& S, const ChainOpfib<K>& E, const json& j, const std::string& at) {
  const auto& B = *E.base;
  ChainSection<K> sec;
  sec.obj.resize(B.nobj());
  std::vector<bool> have(B.nobj(), false);
  for (auto& [o, v] : detail::need(j, "values", at).items()) {
    auto w = at + "/values/" + o;
    int a = detail::index_of(B.obj_names, o, "object", w);
    std::vector<std::string> slots;
    if (v.is_string()) slots.push_back(v.template get<std::string>());
    else for (auto& s : v) slots.push_back(s.template get<std::string>());
    if (int(slots.size()) != E.arity[a])
      throw ScenarioError(w, "fiber over '" + o + "' has " + std::to_string(E.arity[a]) + " slots, got " + std::to_string(slots.size()));
    for (int s = 0; s < int(slots.size()); ++s)
      sec.obj[a].push_back({{slot_key(E.kind, a, s), detail::lookup(S.complexes, slots[s], "complex", w)}});
    have[a] = true;
  }
  for (int a = 0; a < B.nobj(); ++a)
    if (!have[a]) throw ScenarioError(at + "/values", "no value over '" + B.obj_names[a] + "'");
  sec.mor.resize(B.nmor());
  std::vector<bool> done(B.nmor(), false);
  for (int a = 0; a < B.nobj(); ++a) {
    sec.mor[B.ident[a]] = fiber_identity(sec.obj[a]);
    done[B.ident[a]] = true;
  }
  const json none = json::object();
  const auto& mj = j.contains("maps") ? j["maps"] : none;
  for (auto& [m, v] : mj.items()) {
    auto w = at + "/maps/" + m;
    int f = detail::index_of(B.mor_names, m, "morphism", w);
    FiberMap<K> fm{apply_obj(E.trans[f], sec.obj[B.src[f]]), sec.obj[B.tgt[f]], {}};
    std::vector<json> per_slot;
    if (E.arity[B.tgt[f]] == 1 && v.is_object()) per_slot.push_back(v);
    else for (auto& s : v) per_slot.push_back(s);
    if (int(per_slot.size()) != E.arity[B.tgt[f]]) throw ScenarioError(w, "expected one component per target slot");
    for (int s = 0; s < int(per_slot.size()); ++s) {
      auto ws = w + (per_slot.size() > 1 ? "/" + std::to_string(s) : "");
      auto src = slot_cx(fm.src, s), tgt = slot_cx(fm.tgt, s);
      ChainMap<K> g{src, tgt, {}};
      for (auto& [key, entries] : per_slot[s].items()) {
        int n = detail::degree_key(key, ws);
        g.comps[n] = detail::matrix<K>(entries, tgt->dim(n), src->dim(n), ws + "/" + key);
      }
      if (!is_chain_map(g)) throw ScenarioError(ws, "component is not a chain map");
      fm.comps.push_back(g);
    }
    sec.mor[f] = fm;
    done[f] = true;
  }
  for (int f = 0; f < B.nmor(); ++f)
    if (!done[f]) throw ScenarioError(at + "/maps", "no component along '" + B.mor_names[f] + "'");
  return sec;
}

template <class K>
void load_section(Scenario<K>& S, const std::string& name, const json& j, const std::string& at) {
  auto en = detail::need_str(j, "opfibration", at);
  const auto& E = detail::lookup(S.opfibs, en, "opfibration", at + "/opfibration");
  ChainSection<K> sec;
  try {
    if (j.contains("pushed")) {
      auto c0 = detail::index_of(E.base->obj_names, j["pushed"].get<std::string>(), "object", at + "/pushed");
      require_pushable(E);
      sec = pushed_ground_section(E, c0);
    } else if (j.contains("algebra")) {
      const FinStar* fs = nullptr;
      for (auto& [n, F] : S.finstars)
        if (F.cat.get() == E.base.get()) fs = &F;
      if (!fs || E.kind != ChainKind::MTensor) throw ScenarioError(at + "/algebra", "algebra sections need an mtensor opfibration");
      auto an = j["algebra"].get<std::string>();
      if (an == "dual_numbers") sec = algebra_to_section(*fs, E, dual_numbers<K>());
      else if (an == "ground") sec = algebra_to_section(*fs, E, ground_field_algebra<K>());
      else throw ScenarioError(at + "/algebra", "expected dual_numbers or ground");
    } else {
      sec = load_explicit_section(S, E, j, at);
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(at, e.what());
  }
  auto bad = check_chain_section(E, sec);
  if (!bad.empty()) throw ScenarioError(at, bad.front());
  S.sections[name] = {en, sec};
}

// Length of the replacement a presection lives on: everything when the base
// is direct, otherwise the requested bound.
inline int replacement_length(const Cat& c, const json& j, int fallback, const std::string& at) {
  if (j.contains("length")) return detail::need_int(j["length"], at + "/length");
  return is_direct(*c) ? longest_chain(*c) : fallback;
}

template <class K>
void load_presection(Scenario<K>& S, const std::string& name, const json& j, const std::string& at, int max_len) {
  Presection<K> A;
  bool emb = false;
  try {
    if (j.contains("embed")) {
      const auto& [en, sec] = detail::lookup(S.sections, j["embed"].get<std::string>(), "section", at + "/embed");
      const auto& E = S.opfibs.at(en);
      auto R = std::make_shared<const Replacement>(simplicial_replacement(E.base, replacement_length(E.base, j, max_len, at)));
      A = embed_section(E, sec, R);
      emb = true;
    } else if (j.contains("pad")) {
      const auto& B = detail::lookup(S.presections, j["pad"].get<std::string>(), "presection", at + "/pad");
      A = pad_presection(B, detail::lookup(S.complexes, detail::need_str(j, "with", at), "complex", at + "/with"));
    } else if (j.contains("pullback")) {
      const auto& B = detail::lookup(S.presections, j["pullback"].get<std::string>(), "presection", at + "/pullback");
      const auto& F = detail::lookup(S.functors, detail::need_str(j, "along", at), "functor", at + "/along");
      if (F.tgt.get() != B.R->base.get()) throw ScenarioError(at, "functor target is not the presection base");
      auto R = std::make_shared<const Replacement>(simplicial_replacement(F.src, replacement_length(F.src, j, max_len, at)));
      A = pullback_presection(F, B, R);
    } else {
      throw ScenarioError(at, "expected one of 'embed', 'pad', 'pullback'");
    }
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(at, e.what());
  } catch (const std::out_of_range& e) {
    throw ScenarioError(at, std::string("insufficient length bound: ") + e.what());
  }
  auto bad = check_presection(A);
  if (!bad.empty()) throw ScenarioError(at, bad.front());
  S.presections[name] = A;
  S.embedded[name] = emb;
}

template <class F>
void for_each_block(const json& j, const std::string& key, F&& f) {
  if (!j.contains(key)) return;
  if (!j[key].is_object()) throw ScenarioError("/" + key, "expected an object of named blocks");
  for (auto& [name, v] : j[key].items()) f(name, v, "/" + key + "/" + name);
}

// max_len: bound for non-direct replacements and for drivers
template <class K>
Scenario<K> load_scenario(const json& j, int max_len) {
  if (!j.is_object()) throw ScenarioError("/", "scenario must be a JSON object");
  Scenario<K> S;
  S.field = FieldTraits<K>::name();
  try {
    for_each_block(j, "complexes", [&](auto& n, auto& v, auto at) { S.complexes[n] = load_complex<K>(v, at); });
    for_each_block(j, "categories", [&](auto& n, auto& v, auto at) {
      std::optional<FinStar> fs;
      S.cats[n] = load_category(v, at, fs);
      if (fs) S.finstars[n] = *fs;
    });
    for_each_block(j, "functors", [&](auto& n, auto& v, auto at) { S.functors[n] = load_functor(S, v, at); });
    for_each_block(j, "opfibrations", [&](auto& n, auto& v, auto at) { load_opfibration(S, n, v, at); });
    for_each_block(j, "sections", [&](auto& n, auto& v, auto at) { load_section(S, n, v, at); });
    for_each_block(j, "presections", [&](auto& n, auto& v, auto at) { load_presection(S, n, v, at, max_len); });
  } catch (const json::exception& e) {
    throw ScenarioError("/", std::string("malformed block: ") + e.what());
  }
  S.driver = detail::need(j, "driver", "/");
  if (!S.driver.is_object()) throw ScenarioError("/driver", "expected an object");
  return S;
}

// ---------------------------------------------------------------------------
// Running

struct RunResult {
  std::string label;
  Certificate cert;
};

template <class K>
std::vector<std::string> driver_presections(const Scenario<K>& S, const std::string& at) {
  std::vector<std::string> out;
  const auto& pj = detail::need(S.driver, "presections", at);
  if (!pj.is_array() || pj.empty()) throw ScenarioError(at + "/presections", "expected a nonempty list");
  for (auto& p : pj) {
    auto n = p.template get<std::string>();
    detail::lookup(S.presections, n, "presection", at + "/presections");
    out.push_back(n);
  }
  return out;
}

// Structural checks on every block, one certificate per block kind.
template <class K>
std::vector<RunResult> run_props(const Scenario<K>& S) {
  std::vector<RunResult> out;
  if (!S.families.empty()) {
    RunResult r{"opfibrations (cat)", {"props", 0, true, {}, {}}};
    for (auto& [n, E] : S.families) {
      auto T = grothendieck(E);
      auto bad = check_opfibration(T.proj);
      r.cert.add(bool_row(n, "opfibration", bad.empty()));
      for (auto& s : bad) r.cert.notes.push_back(n + ": " + s);
    }
    out.push_back(std::move(r));
  }
  if (!S.opfibs.empty()) {
    RunResult r{"opfibrations (chain)", {"props", 0, true, {}, {}}};
    for (auto& [n, E] : S.opfibs) {
      auto bad = check_strictness(E);
      r.cert.add(bool_row(n, "strict", bad.empty()));
      for (auto& s : bad) r.cert.notes.push_back(n + ": " + s);
    }
    out.push_back(std::move(r));
  }
  if (!S.presections.empty()) {
    RunResult r{"presections", {"props", 0, true, {}, {}}};
    for (auto& [n, A] : S.presections) {
      r.cert.max_len = std::max(r.cert.max_len, A.R->L);
      auto d = is_derived_section(A);
      r.cert.add(bool_row(n, "derived", d.ok));
      if (S.embedded.at(n)) r.cert.add(bool_row(n, "identity-anchors", d.identity_anchors));
      for (auto& s : d.failures) r.cert.notes.push_back(n + ": " + s);
    }
    out.push_back(std::move(r));
  }
  return out;
}

template <class K>
std::vector<RunResult> run_scenario(const Scenario<K>& S, int max_len) {
  const std::string at = "/driver";
  auto d = detail::need_str(S.driver, "driver", at);
  if (d == "props") return run_props(S);
  if (d != "ff" && d != "es") throw ScenarioError(at + "/driver", "unknown driver '" + d + "' (expected ff, es or props)");
  const auto& F = detail::lookup(S.functors, detail::need_str(S.driver, "resolution", at), "functor", at + "/resolution");
  std::vector<RunResult> out;
  for (auto& n : driver_presections(S, at)) {
    const auto& A = S.presections.at(n);
    try {
      if (d == "ff") {
        if (A.R->base.get() != F.tgt.get()) throw ScenarioError(at, "presection '" + n + "' does not live over the resolution target");
        out.push_back({n, verify_theorem_ff(F, A, max_len)});
      } else {
        const auto& E = detail::lookup(S.opfibs, detail::need_str(S.driver, "opfibration", at), "opfibration", at + "/opfibration");
        if (A.R->base.get() != F.src.get()) throw ScenarioError(at, "presection '" + n + "' does not live over the resolution source");
        out.push_back({n, verify_theorem_es(F, E, A, max_len)});
      }
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ScenarioError(at + " (" + n + ")", e.what());
    } catch (const std::out_of_range& e) {
      throw ScenarioError(at + " (" + n + ")", std::string("insufficient length bound: ") + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline json certificate_json(const RunResult& r) {
  json rows = json::array();
  for (auto& v : r.cert.rows)
    rows.push_back({{"object", v.object}, {"leg", v.leg}, {"homology_before", v.h_src}, {"homology_after", v.h_tgt}, {"verdict", v.ok ? "pass" : "fail"}});
  return {{"label", r.label}, {"driver", r.cert.driver}, {"max_len", r.cert.max_len}, {"ok", r.cert.ok}, {"rows", rows}, {"notes", r.cert.notes}};
}

// display width, counting each UTF-8 code point once
inline std::size_t text_width(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s)
    if ((c & 0xC0) != 0x80) ++n;
  return n;
}

inline std::string pad(const std::string& s, std::size_t w) {
  auto n = text_width(s);
  return s + std::string(n < w ? w - n : 0, ' ');
}

inline std::string render_report(const std::string& source, const std::string& field, const std::vector<RunResult>& runs) {
  std::ostringstream os;
  bool ok = true;
  for (auto& r : runs) ok = ok && r.cert.ok;
  os << "scenario " << source << "  field " << field << "\n";
  for (auto& r : runs) {
    os << "\n[" << r.label << "] driver " << r.cert.driver << ": " << (r.cert.ok ? "pass" : "FAIL") << "\n";
    std::vector<std::array<std::string, 5>> t{{"object", "leg", "before", "after", "verdict"}};
    for (auto& v : r.cert.rows) t.push_back({v.object, v.leg, v.h_src, v.h_tgt, v.ok ? "pass" : "FAIL"});
    std::array<std::size_t, 5> w{};
    for (auto& row : t)
      for (int c = 0; c < 5; ++c) w[c] = std::max(w[c], text_width(row[c]));
    for (auto& row : t) {
      os << "  ";
      for (int c = 0; c < 5; ++c) os << (c ? "  " : "") << (c < 4 ? pad(row[c], w[c]) : row[c]);
      os << "\n";
    }
    for (auto& n : r.cert.notes) os << "  note: " << n << "\n";
  }
  json block = {{"scenario", source}, {"field", field}, {"ok", ok}, {"runs", json::array()}};
  for (auto& r : runs) block["runs"].push_back(certificate_json(r));
  os << "\n--- certificate ---\n" << block.dump(2) << "\n";
  return os.str();
}

}  // namespace dsec

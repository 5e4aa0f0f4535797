#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsec/fib.hpp"

namespace dsec {

// ---------------------------------------------------------------------------
// Chains as objects of the simplicial replacement

inline int chain_composite(const FinCategory& c, const Chain& x, int i, int j) {
  int v = chain_vertex(c, x, i);
  int r = c.ident[v];
  for (int k = i; k < j; ++k) r = c.compose(x.mors[k], r);
  return r;
}

inline int head(const Chain& x) { return x.start; }
inline int tail(const FinCategory& c, const Chain& x) { return chain_vertex(c, x, x.length()); }

// Chain with vertices x_{a(0)}, ..., x_{a(m)}.
inline Chain pull_chain(const FinCategory& c, const Chain& x, const std::vector<int>& a) {
  Chain y{chain_vertex(c, x, a[0]), {}};
  for (std::size_t k = 0; k + 1 < a.size(); ++k) y.mors.push_back(chain_composite(c, x, a[k], a[k + 1]));
  return y;
}

inline Chain concat_chain(const FinCategory& c, const Chain& x, int alpha, const Chain& y) {
  if (c.src[alpha] != tail(c, x) || c.tgt[alpha] != y.start) throw std::invalid_argument("concat_chain: attaching map does not fit");
  Chain r = x;
  r.mors.push_back(alpha);
  r.mors.insert(r.mors.end(), y.mors.begin(), y.mors.end());
  return r;
}

inline Chain map_chain(const FinFunctor& F, const Chain& x) {
  Chain y{F.obj[x.start], {}};
  for (int f : x.mors) y.mors.push_back(F.mor[f]);
  return y;
}

inline std::string chain_name(const FinCategory& c, const Chain& x) {
  std::string s = c.obj_names[x.start];
  for (int f : x.mors) {
    bool unique = c.hom(c.src[f], c.tgt[f]).size() == 1;
    s += unique ? "→" : "-" + c.mor_names[f] + "→";
    s += c.obj_names[c.tgt[f]];
  }
  return "(" + s + ")";
}

inline std::string amap_name(const std::vector<int>& a) {
  std::string s = "[";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
  return s + "]";
}

// All composable chains (identities allowed) of length <= L.
inline std::vector<std::vector<Chain>> all_chains(const FinCategory& c, int L) {
  std::vector<std::vector<Chain>> out(L + 1);
  for (int a = 0; a < c.nobj(); ++a) out[0].push_back({a, {}});
  for (int n = 1; n <= L; ++n) {
    for (auto& x : out[n - 1]) {
      int e = tail(c, x);
      for (int f = 0; f < c.nmor(); ++f)
        if (c.src[f] == e) {
          Chain y = x;
          y.mors.push_back(f);
          out[n].push_back(y);
        }
    }
    std::sort(out[n].begin(), out[n].end());
  }
  return out;
}

inline void monotone_maps(int m, int n, bool injective, std::vector<std::vector<int>>& out) {
  std::vector<int> a(m + 1);
  std::function<void(int, int)> rec = [&](int k, int lo) {
    if (k > m) {
      out.push_back(a);
      return;
    }
    for (int v = lo; v <= n; ++v) {
      a[k] = v;
      rec(k + 1, injective ? v + 1 : v);
    }
  };
  rec(0, 0);
}

struct SimpMorphism {
  int src = 0, tgt = 0;
  std::vector<int> a;  // [m] -> [n]
};

// Simplicial replacement up to length L. Reduced mode keeps identity-free
// chains only and needs a direct base; otherwise every chain is an object.
struct Replacement {
  Cat base;
  int L = 0;
  bool reduced = true;
  std::vector<Chain> objs;
  std::map<Chain, int> index;
  std::vector<SimpMorphism> mors;
  std::map<std::pair<int, std::vector<int>>, int> mor_index;
  std::vector<std::vector<int>> out;  // morphisms by source

  int find(const Chain& x) const {
    auto it = index.find(x);
    if (it == index.end()) throw std::out_of_range("chain " + chain_name(*base, x) + " is outside the replacement");
    return it->second;
  }
  int find_mor(int src, const std::vector<int>& a) const {
    auto it = mor_index.find({src, a});
    if (it == mor_index.end()) throw std::out_of_range("morphism not in replacement");
    return it->second;
  }
  const Chain& obj(int i) const { return objs[i]; }
  bool exact() const { return reduced && is_direct(*base) && L >= longest_chain(*base); }
};

inline Replacement simplicial_replacement(const Cat& c, int L, std::optional<bool> reduced = std::nullopt) {
  Replacement R;
  R.base = c;
  R.L = L;
  R.reduced = reduced.value_or(is_direct(*c));
  if (R.reduced && !is_direct(*c)) throw std::invalid_argument("reduced replacement needs a direct base");
  auto chains = R.reduced ? reduced_chains(*c, L) : all_chains(*c, L);
  for (auto& v : chains)
    for (auto& x : v) {
      R.index[x] = int(R.objs.size());
      R.objs.push_back(x);
    }
  R.out.resize(R.objs.size());
  for (int s = 0; s < int(R.objs.size()); ++s) {
    int n = R.objs[s].length();
    int top = R.reduced ? std::min(n, L) : L;
    for (int m = 0; m <= top; ++m) {
      std::vector<std::vector<int>> as;
      monotone_maps(m, n, R.reduced, as);
      for (auto& a : as) {
        Chain y = pull_chain(*c, R.objs[s], a);
        auto it = R.index.find(y);
        if (it == R.index.end()) continue;
        int id = int(R.mors.size());
        R.mors.push_back({s, it->second, a});
        R.mor_index[{s, a}] = id;
        R.out[s].push_back(id);
      }
    }
  }
  return R;
}

inline bool is_identity_amap(const std::vector<int>& a, int n) {
  if (int(a.size()) != n + 1) return false;
  for (int i = 0; i <= n; ++i)
    if (a[i] != i) return false;
  return true;
}

enum class MorClass { Identity, Anchor, Structural, Neither };

inline const char* class_name(MorClass k) {
  switch (k) {
    case MorClass::Identity: return "identity";
    case MorClass::Anchor: return "anchor";
    case MorClass::Structural: return "structural";
    default: return "neither";
  }
}

inline bool is_anchor_amap(const std::vector<int>& a) {
  for (int i = 0; i < int(a.size()); ++i)
    if (a[i] != i) return false;
  return true;
}

inline bool is_structural_amap(const FinCategory& c, const Chain& src, const std::vector<int>& a) {
  int n = src.length();
  return a.back() == n && c.is_identity(chain_composite(c, src, a.back(), n));
}

inline MorClass classify(const FinCategory& c, const Chain& src, const std::vector<int>& a) {
  if (is_identity_amap(a, src.length())) return MorClass::Identity;
  if (is_anchor_amap(a)) return MorClass::Anchor;
  if (is_structural_amap(c, src, a)) return MorClass::Structural;
  return MorClass::Neither;
}

inline MorClass classify(const Replacement& R, int mor) {
  return classify(*R.base, R.objs[R.mors[mor].src], R.mors[mor].a);
}

// Base morphisms c_0 -> c'_0 (head) and c'_m -> c_n (tail).
inline int head_morphism(const FinCategory& c, const Chain& src, const std::vector<int>& a) {
  return chain_composite(c, src, 0, a.front());
}
inline int tail_morphism(const FinCategory& c, const Chain& src, const std::vector<int>& a) {
  return chain_composite(c, src, a.back(), src.length());
}

inline std::vector<int> compose_amaps(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r;
  for (int k : b) r.push_back(a[k]);
  return r;
}

struct Factorization {
  int anchor = -1, structural = -1;  // morphism ids; phi = structural ∘ anchor
};

inline Factorization factorize(const Replacement& R, int mor) {
  const auto& phi = R.mors[mor];
  int top = phi.a.back();
  std::vector<int> pre(top + 1);
  for (int i = 0; i <= top; ++i) pre[i] = i;
  Factorization f;
  f.anchor = R.find_mor(phi.src, pre);
  int mid = R.mors[f.anchor].tgt;
  f.structural = R.find_mor(mid, phi.a);
  return f;
}

// Number of (anchor, structural) pairs recomposing to phi, by search.
inline int count_factorizations(const Replacement& R, int mor) {
  const auto& phi = R.mors[mor];
  const auto& C = *R.base;
  int count = 0;
  for (int m1 : R.out[phi.src]) {
    const auto& p = R.mors[m1];
    if (!is_anchor_amap(p.a)) continue;
    for (int m2 : R.out[p.tgt]) {
      const auto& q = R.mors[m2];
      if (q.tgt != phi.tgt) continue;
      if (!is_structural_amap(C, R.objs[p.tgt], q.a)) continue;
      if (compose_amaps(p.a, q.a) == phi.a) ++count;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// Presections

template <class K>
struct Presection {
  ChainOpfib<K> E;
  std::shared_ptr<const Replacement> R;
  std::vector<FiberObj<K>> val;
  std::vector<FiberMap<K>> comp;  // by morphism of R, A(src) -> (t phi)_! A(tgt)

  const FinCategory& base() const { return *R->base; }
  int tmor(int mor) const { return tail_morphism(*R->base, R->objs[R->mors[mor].src], R->mors[mor].a); }
};

// Normalize an arbitrary chain and a-map to the replacement.
struct Normalized {
  int src = -1, mor = -1;  // mor < 0: identity after reduction
};

inline std::pair<int, std::vector<int>> normalize_chain(const Replacement& R, const Chain& x) {
  if (!R.reduced) return {R.find(x), {}};
  auto [r, eta] = reduce_chain(*R.base, x);
  return {R.find(r), eta};
}

inline Normalized normalize_morphism(const Replacement& R, const Chain& x, const std::vector<int>& a) {
  Normalized N;
  if (!R.reduced) {
    N.src = R.find(x);
    N.mor = R.find_mor(N.src, a);
    return N;
  }
  auto [r, eta] = reduce_chain(*R.base, x);
  auto [ry, etay] = reduce_chain(*R.base, pull_chain(*R.base, x, a));
  std::vector<int> ar(ry.length() + 1, -1);
  for (int k = 0; k < int(a.size()); ++k) ar[etay[k]] = eta[a[k]];
  N.src = R.find(r);
  N.mor = R.find_mor(N.src, ar);
  return N;
}

template <class K>
const FiberObj<K>& value_at(const Presection<K>& A, const Chain& x) {
  return A.val[normalize_chain(*A.R, x).first];
}

template <class K>
const FiberMap<K>& component_at(const Presection<K>& A, const Chain& x, const std::vector<int>& a) {
  return A.comp[normalize_morphism(*A.R, x, a).mor];
}

template <class K>
std::vector<std::string> check_presection(const Presection<K>& A) {
  std::vector<std::string> bad;
  const auto& R = *A.R;
  const auto& C = *R.base;
  auto mname = [&](int m) { return chain_name(C, R.objs[R.mors[m].src]) + amap_name(R.mors[m].a); };
  if (A.val.size() != R.objs.size() || A.comp.size() != R.mors.size()) {
    bad.push_back("presection tables have wrong size");
    return bad;
  }
  for (int s = 0; s < int(R.objs.size()); ++s)
    if (int(A.val[s].size()) != A.E.arity[tail(C, R.objs[s])]) bad.push_back("value at " + chain_name(C, R.objs[s]) + " has wrong arity");
  if (!bad.empty()) return bad;
  for (int m = 0; m < int(R.mors.size()); ++m) {
    const auto& p = R.mors[m];
    const auto& f = A.comp[m];
    auto want = apply_obj(A.E.trans[A.tmor(m)], A.val[p.tgt]);
    if (!same_fiber_obj(f.src, A.val[p.src]) || !same_fiber_obj(f.tgt, want)) {
      bad.push_back("component at " + mname(m) + " has wrong endpoints");
      continue;
    }
    for (auto& c : f.comps)
      if (!is_chain_map(c)) bad.push_back("component at " + mname(m) + " is not a chain map");
    if (is_identity_amap(p.a, R.objs[p.src].length()) && !fiber_maps_equal(f, fiber_identity(A.val[p.src])))
      bad.push_back("identity at " + chain_name(C, R.objs[p.src]) + " not sent to the identity");
  }
  if (!bad.empty()) return bad;
  for (int m1 = 0; m1 < int(R.mors.size()); ++m1) {
    const auto& p = R.mors[m1];
    for (int m2 : R.out[p.tgt]) {
      const auto& q = R.mors[m2];
      auto it = R.mor_index.find({p.src, compose_amaps(p.a, q.a)});
      if (it == R.mor_index.end()) continue;
      auto rhs = fiber_compose(apply_map(A.E.trans[A.tmor(m1)], A.comp[m2]), A.comp[m1]);
      if (!fiber_maps_equal(A.comp[it->second], rhs))
        bad.push_back("cocycle fails for " + mname(m2) + " after " + mname(m1));
    }
  }
  return bad;
}

// i(S)(c) = (f_n ... f_1)_! S(c_0); components are transitions of S's components.
template <class K>
Presection<K> embed_section(const ChainOpfib<K>& E, const ChainSection<K>& S, std::shared_ptr<const Replacement> R) {
  Presection<K> A{E, R, {}, {}};
  const auto& C = *R->base;
  for (auto& x : R->objs) A.val.push_back(apply_obj(E.trans[chain_composite(C, x, 0, x.length())], S.obj[x.start]));
  for (auto& p : R->mors) {
    const auto& x = R->objs[p.src];
    int up = chain_composite(C, x, 0, p.a.front());
    int rest = chain_composite(C, x, p.a.front(), x.length());
    A.comp.push_back(apply_map(E.trans[rest], S.mor[up]));
  }
  return A;
}

// Presection morphism: per object a fiber map.
template <class K>
struct PresectionMap {
  std::vector<FiberMap<K>> comp;
};

template <class K>
std::vector<std::string> check_presection_map(const Presection<K>& A, const Presection<K>& B, const PresectionMap<K>& f) {
  std::vector<std::string> bad;
  const auto& R = *A.R;
  for (int m = 0; m < int(R.mors.size()); ++m) {
    const auto& p = R.mors[m];
    auto lhs = fiber_compose(apply_map(A.E.trans[A.tmor(m)], f.comp[p.tgt]), A.comp[m]);
    auto rhs = fiber_compose(B.comp[m], f.comp[p.src]);
    if (!fiber_maps_equal(lhs, rhs)) bad.push_back("not natural at " + chain_name(*R.base, R.objs[p.src]) + amap_name(p.a));
  }
  return bad;
}

template <class K>
bool is_weak_equivalence(const PresectionMap<K>& f) {
  for (auto& c : f.comp)
    if (!fiber_is_quasi_iso(c)) return false;
  return true;
}

struct DerivedReport {
  bool ok = true;
  int anchors = 0;
  bool identity_anchors = true;
  std::vector<std::string> failures;
};

// Anchor components must be quasi-isos. In non-reduced mode the
// degeneracies c -> (c_0 = c_0 -> ... ) are also checked.
template <class K>
DerivedReport is_derived_section(const Presection<K>& A) {
  DerivedReport r;
  const auto& R = *A.R;
  const auto& C = *R.base;
  for (int m = 0; m < int(R.mors.size()); ++m) {
    if (classify(R, m) != MorClass::Anchor) continue;
    ++r.anchors;
    const auto& f = A.comp[m];
    if (!fiber_is_quasi_iso(f)) {
      r.ok = false;
      r.failures.push_back("anchor " + chain_name(C, R.objs[R.mors[m].src]) + amap_name(R.mors[m].a) + " is not a quasi-iso");
    }
    if (!fiber_maps_equal(f, fiber_identity(f.src))) r.identity_anchors = false;
  }
  if (!R.reduced) {
    for (int s = 0; s < int(R.objs.size()); ++s) {
      const auto& x = R.objs[s];
      if (x.length() + 1 > R.L) continue;
      Chain y = x;
      y.mors.insert(y.mors.begin(), C.ident[x.start]);
      // y -> x dropping the repeated first vertex is structural
      int ys = R.find(y);
      int m = R.find_mor(ys, [&] {
        std::vector<int> b;
        for (int i = 0; i <= x.length(); ++i) b.push_back(i + 1);
        return b;
      }());
      if (!fiber_is_quasi_iso(A.comp[m])) {
        r.ok = false;
        r.failures.push_back("degeneracy at " + chain_name(C, x) + " is not a quasi-iso");
      }
    }
  }
  return r;
}

// (F^* A)(d) = A(F d), components A(F phi), over the pulled-back opfibration.
template <class K>
Presection<K> pullback_presection(const FinFunctor& F, const Presection<K>& A, std::shared_ptr<const Replacement> RD) {
  Presection<K> B{pullback(F, A.E), RD, {}, {}};
  for (auto& x : RD->objs) B.val.push_back(value_at(A, map_chain(F, x)));
  for (auto& p : RD->mors) {
    B.comp.push_back(component_at(A, map_chain(F, RD->objs[p.src]), p.a));
  }
  return B;
}

// Chains of the replacement lying in the fiber over c.
inline bool chain_in_fiber(const FinFunctor& F, const Chain& x, int c) {
  if (F.obj[x.start] != c) return false;
  for (int f : x.mors)
    if (F.mor[f] != F.tgt->ident[c]) return false;
  return true;
}

struct LocalReport {
  bool ok = true;
  int checked = 0;
  std::vector<std::string> failures;
};

template <class K>
LocalReport is_locally_constant(const Presection<K>& B, const FinFunctor& F) {
  LocalReport r;
  const auto& R = *B.R;
  const auto& D = *R.base;
  for (int m = 0; m < int(R.mors.size()); ++m) {
    const auto& p = R.mors[m];
    const auto& x = R.objs[p.src];
    int c = F.obj[x.start];
    if (!chain_in_fiber(F, x, c)) continue;
    if (is_identity_amap(p.a, x.length())) continue;
    ++r.checked;
    if (!fiber_is_quasi_iso(B.comp[m])) {
      r.ok = false;
      r.failures.push_back("fiber morphism " + chain_name(D, x) + amap_name(p.a) + " -> " + chain_name(D, R.objs[p.tgt]) +
                           " over " + F.tgt->obj_names[c] + " is not a quasi-iso");
    }
  }
  return r;
}

// Restriction of an arity-one presection to the replacement of a
// subcategory, as a functor into chain complexes (constant opfibration).
template <class K>
Presection<K> restrict_presection(const Presection<K>& B, const SubCategory& sub, std::shared_ptr<const Replacement> RS) {
  Presection<K> X{constant_opfib<K>(sub.cat), RS, {}, {}};
  for (auto& x : RS->objs) X.val.push_back(value_at(B, map_chain(sub.incl, x)));
  for (auto& p : RS->mors) {
    auto f = component_at(B, map_chain(sub.incl, RS->objs[p.src]), p.a);
    X.comp.push_back(f);
  }
  return X;
}

// |Pi X| for X a presection of a constant arity-one opfibration, i.e. a
// functor on the replacement into chain complexes.
template <class K>
struct FunctorRealization {
  NSimp<K> X;
  Realized<K> R;
  std::vector<int> level0;  // object id -> level-0 summand
  std::vector<ChainMap<K>> incl;  // per base object
  bool exact = true;
};

template <class K>
FunctorRealization<K> realize_functor(const Presection<K>& A) {
  const auto& R = *A.R;
  const auto& C = *R.base;
  FunctorRealization<K> out;
  out.exact = R.exact();
  std::map<int, std::pair<int, int>> where;  // obj -> (level, summand)
  for (int s = 0; s < int(R.objs.size()); ++s) {
    if (A.val[s].size() != 1) throw std::invalid_argument("realize_functor needs arity one");
    const auto& x = R.objs[s];
    if (R.reduced || is_reduced(C, x)) where[s] = {x.length(), out.X.add_summand(x.length(), slot_cx(A.val[s], 0))};
  }
  for (auto& [s, ls] : where) {
    auto [n, k] = ls;
    if (n == 0) continue;
    const auto& x = R.objs[s];
    for (int i = 0; i <= n; ++i) {
      std::vector<int> a;
      for (int j = 0; j <= n; ++j)
        if (j != i) a.push_back(j);
      int m = R.find_mor(s, a);
      int t = R.mors[m].tgt;
      auto it = where.find(t);
      if (it == where.end()) throw std::invalid_argument("realize_functor: face of " + chain_name(C, x) + " is degenerate");
      std::vector<int> eta(n);
      for (int j = 0; j < n; ++j) eta[j] = j;
      out.X.face[n][k][i].push_back({eta, it->second.second, A.comp[m].comps[0]});
    }
  }
  out.R = realize(out.X);
  for (int c = 0; c < C.nobj(); ++c) {
    int s = R.find(Chain{c, {}});
    out.level0.push_back(where.at(s).second);
    out.incl.push_back(level0_inclusion(out.X, out.R, where.at(s).second));
  }
  return out;
}

}  // namespace dsec

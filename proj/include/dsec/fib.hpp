#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsec/chain.hpp"
#include "dsec/fincat.hpp"
#include "dsec/realize.hpp"

namespace dsec {

// ===========================================================================
// CAT-valued strict families

// Covariant: trans[f]: fiber[src f] -> fiber[tgt f] (an opfibration after
// the Grothendieck construction). Contravariant: trans[f]: fiber[tgt f] ->
// fiber[src f] (a fibration).
struct CatFamily {
  Cat base;
  bool contravariant = false;
  std::vector<Cat> fiber;
  std::vector<FinFunctor> trans;

  int trans_src(int f) const { return contravariant ? base->tgt[f] : base->src[f]; }
  int trans_tgt(int f) const { return contravariant ? base->src[f] : base->tgt[f]; }
};

inline std::vector<std::string> check_family(const CatFamily& E) {
  std::vector<std::string> bad;
  const auto& B = *E.base;
  if (int(E.fiber.size()) != B.nobj() || int(E.trans.size()) != B.nmor()) {
    bad.push_back("family tables have wrong size");
    return bad;
  }
  for (int f = 0; f < B.nmor(); ++f) {
    const auto& T = E.trans[f];
    if (T.src.get() != E.fiber[E.trans_src(f)].get() || T.tgt.get() != E.fiber[E.trans_tgt(f)].get()) {
      bad.push_back("transition along " + B.mor_names[f] + " has wrong fibers");
      continue;
    }
    for (auto& s : check_functor(T)) bad.push_back("transition along " + B.mor_names[f] + ": " + s);
  }
  if (!bad.empty()) return bad;
  for (int c = 0; c < B.nobj(); ++c)
    if (!same_functor(E.trans[B.ident[c]], identity_functor(E.fiber[c])))
      bad.push_back("transition along identity of " + B.obj_names[c] + " is not the identity");
  for (int f = 0; f < B.nmor(); ++f)
    for (int g = 0; g < B.nmor(); ++g) {
      int gf = B.comp[g][f];
      if (gf < 0) continue;
      auto c = E.contravariant ? compose(E.trans[f], E.trans[g]) : compose(E.trans[g], E.trans[f]);
      if (!same_functor(c, E.trans[gf]))
        bad.push_back("transitions not strictly functorial on " + B.mor_names[g] + "∘" + B.mor_names[f]);
    }
  return bad;
}

inline bool same_family(const CatFamily& a, const CatFamily& b) {
  if (a.contravariant != b.contravariant || !same_category(*a.base, *b.base)) return false;
  if (a.fiber.size() != b.fiber.size() || a.trans.size() != b.trans.size()) return false;
  for (std::size_t i = 0; i < a.fiber.size(); ++i)
    if (!same_category(*a.fiber[i], *b.fiber[i])) return false;
  for (std::size_t f = 0; f < a.trans.size(); ++f)
    if (!same_functor(a.trans[f], b.trans[f])) return false;
  return true;
}

struct Total {
  Cat cat;
  FinFunctor proj;
  std::vector<std::pair<int, int>> obj;  // (c, x)
  std::vector<std::pair<int, int>> mor;  // (f, fiber morphism)
  std::map<std::pair<int, int>, int> obj_index;
};

// Covariant: morphisms (f, a: f_! x -> x'). Contravariant: (f, b: x -> f^* x').
inline Total grothendieck(const CatFamily& E) {
  const auto& B = *E.base;
  Total T;
  auto c = std::make_shared<FinCategory>();
  for (int b = 0; b < B.nobj(); ++b)
    for (int x = 0; x < E.fiber[b]->nobj(); ++x) {
      T.obj_index[{b, x}] = int(T.obj.size());
      T.obj.emplace_back(b, x);
      c->obj_names.push_back("(" + B.obj_names[b] + "," + E.fiber[b]->obj_names[x] + ")");
    }
  c->ident.assign(T.obj.size(), -1);
  std::map<std::tuple<int, int, int>, int> mid;  // (src obj, f, a)
  for (int o = 0; o < int(T.obj.size()); ++o) {
    auto [b, x] = T.obj[o];
    for (int f = 0; f < B.nmor(); ++f) {
      if (B.src[f] != b) continue;
      int b2 = B.tgt[f];
      const auto& tr = E.trans[f];
      for (int x2 = 0; x2 < E.fiber[b2]->nobj(); ++x2) {
        const std::vector<int>& cands =
            E.contravariant ? E.fiber[b]->hom(x, tr.obj[x2]) : E.fiber[b2]->hom(tr.obj[x], x2);
        for (int a : cands) {
          int id = int(T.mor.size());
          T.mor.emplace_back(f, a);
          c->src.push_back(o);
          c->tgt.push_back(T.obj_index.at({b2, x2}));
          c->mor_names.push_back("(" + B.mor_names[f] + "," + (E.contravariant ? E.fiber[b] : E.fiber[b2])->mor_names[a] + ")");
          mid[{o, f, a}] = id;
          if (f == B.ident[b] && x2 == x && a == E.fiber[b]->ident[x]) c->ident[o] = id;
        }
      }
    }
  }
  int M = int(T.mor.size());
  c->comp.assign(M, std::vector<int>(M, -1));
  for (int m1 = 0; m1 < M; ++m1)
    for (int m2 = 0; m2 < M; ++m2) {
      if (c->tgt[m1] != c->src[m2]) continue;
      auto [f, a] = T.mor[m1];
      auto [g, b] = T.mor[m2];
      int gf = B.comp[g][f];
      int comp;
      if (E.contravariant) {
        // (g,b)∘(f,a) = (gf, f^*(b)∘a)
        const auto& F0 = *E.fiber[B.src[f]];
        comp = F0.comp[E.trans[f].mor[b]][a];
      } else {
        // (g,b)∘(f,a) = (gf, b∘g_!(a))
        const auto& F2 = *E.fiber[B.tgt[g]];
        comp = F2.comp[b][E.trans[g].mor[a]];
      }
      c->comp[m2][m1] = mid.at({c->src[m1], gf, comp});
    }
  c->finalize();
  T.cat = c;
  T.proj = FinFunctor{c, E.base, {}, {}};
  for (auto& [b, x] : T.obj) T.proj.obj.push_back(b);
  for (auto& [f, a] : T.mor) T.proj.mor.push_back(f);
  return T;
}

// m: e -> e' is opCartesian if every m2: e -> e'' over g∘p(m) factors
// uniquely as h∘m with p(h) = g.
inline bool is_opcartesian(const FinFunctor& p, int m) {
  const auto& E = *p.src;
  const auto& C = *p.tgt;
  int e = E.src[m], e1 = E.tgt[m];
  for (int e2 = 0; e2 < E.nobj(); ++e2)
    for (int g : C.hom(p.obj[e1], p.obj[e2]))
      for (int m2 : E.hom(e, e2)) {
        if (p.mor[m2] != C.comp[g][p.mor[m]]) continue;
        int count = 0;
        for (int h : E.hom(e1, e2))
          if (p.mor[h] == g && E.comp[h][m] == m2) ++count;
        if (count != 1) return false;
      }
  return true;
}

// m: e' -> e is Cartesian if every m2: e'' -> e over p(m)∘g factors
// uniquely as m∘h with p(h) = g.
inline bool is_cartesian(const FinFunctor& p, int m) {
  const auto& E = *p.src;
  const auto& C = *p.tgt;
  int e1 = E.src[m], e = E.tgt[m];
  for (int e2 = 0; e2 < E.nobj(); ++e2)
    for (int g : C.hom(p.obj[e2], p.obj[e1]))
      for (int m2 : E.hom(e2, e)) {
        if (p.mor[m2] != C.comp[p.mor[m]][g]) continue;
        int count = 0;
        for (int h : E.hom(e2, e1))
          if (p.mor[h] == g && E.comp[m][h] == m2) ++count;
        if (count != 1) return false;
      }
  return true;
}

// Every (e, f: p e -> c) has an opCartesian lift, and opCartesian maps compose.
inline std::vector<std::string> check_opfibration(const FinFunctor& p) {
  std::vector<std::string> bad;
  const auto& E = *p.src;
  const auto& C = *p.tgt;
  std::vector<bool> oc(E.nmor());
  for (int m = 0; m < E.nmor(); ++m) oc[m] = is_opcartesian(p, m);
  for (int e = 0; e < E.nobj(); ++e)
    for (int f = 0; f < C.nmor(); ++f) {
      if (C.src[f] != p.obj[e]) continue;
      bool found = false;
      for (int m = 0; m < E.nmor() && !found; ++m)
        if (E.src[m] == e && p.mor[m] == f && oc[m]) found = true;
      if (!found) bad.push_back("no opCartesian lift of " + C.mor_names[f] + " at " + E.obj_names[e]);
    }
  for (int m1 = 0; m1 < E.nmor(); ++m1)
    for (int m2 = 0; m2 < E.nmor(); ++m2)
      if (oc[m1] && oc[m2] && E.comp[m2][m1] >= 0 && !oc[E.comp[m2][m1]])
        bad.push_back("opCartesian morphisms do not compose: " + E.mor_names[m2] + "∘" + E.mor_names[m1]);
  return bad;
}

inline std::vector<std::string> check_fibration(const FinFunctor& p) {
  std::vector<std::string> bad;
  const auto& E = *p.src;
  const auto& C = *p.tgt;
  for (int e = 0; e < E.nobj(); ++e)
    for (int f = 0; f < C.nmor(); ++f) {
      if (C.tgt[f] != p.obj[e]) continue;
      bool found = false;
      for (int m = 0; m < E.nmor() && !found; ++m)
        if (E.tgt[m] == e && p.mor[m] == f && is_cartesian(p, m)) found = true;
      if (!found) bad.push_back("no Cartesian lift of " + C.mor_names[f] + " at " + E.obj_names[e]);
    }
  return bad;
}

// Fiber of a functor over c as a full subcategory on objects mapping to c,
// restricted to morphisms mapping to the identity.
inline SubCategory functor_fiber(const FinFunctor& F, int c) {
  const auto& D = *F.src;
  std::vector<int> objs;
  for (int d = 0; d < D.nobj(); ++d)
    if (F.obj[d] == c) objs.push_back(d);
  std::map<int, int> oid, mid;
  auto cat = std::make_shared<FinCategory>();
  for (int o : objs) {
    oid[o] = cat->nobj();
    cat->obj_names.push_back(D.obj_names[o]);
  }
  std::vector<int> back;
  for (int f = 0; f < D.nmor(); ++f)
    if (oid.count(D.src[f]) && oid.count(D.tgt[f]) && F.mor[f] == F.tgt->ident[c]) {
      mid[f] = int(back.size());
      back.push_back(f);
      cat->src.push_back(oid[D.src[f]]);
      cat->tgt.push_back(oid[D.tgt[f]]);
      cat->mor_names.push_back(D.mor_names[f]);
    }
  for (int o : objs) cat->ident.push_back(mid[D.ident[o]]);
  int M = int(back.size());
  cat->comp.assign(M, std::vector<int>(M, -1));
  for (int f = 0; f < M; ++f)
    for (int g = 0; g < M; ++g)
      if (cat->tgt[f] == cat->src[g]) cat->comp[g][f] = mid.at(D.comp[back[g]][back[f]]);
  cat->finalize();
  return SubCategory{cat, FinFunctor{cat, F.src, objs, back}};
}

inline FinFunctor opposite_functor(const FinFunctor& F, const Cat& src_op, const Cat& tgt_op) {
  return FinFunctor{src_op, tgt_op, F.obj, F.mor};
}

// Same fibers and transitions over the opposite base, variance flipped.
inline CatFamily transpose(const CatFamily& E) {
  CatFamily T = E;
  T.base = opposite(*E.base);
  T.contravariant = !E.contravariant;
  return T;
}

inline CatFamily pullback(const FinFunctor& F, const CatFamily& E) {
  CatFamily P;
  P.base = F.src;
  P.contravariant = E.contravariant;
  for (int d : F.obj) P.fiber.push_back(E.fiber[d]);
  for (int u : F.mor) P.trans.push_back(E.trans[u]);
  return P;
}

inline CatFamily constant_family(const Cat& base, const Cat& fiber, bool contravariant = false) {
  CatFamily E;
  E.base = base;
  E.contravariant = contravariant;
  E.fiber.assign(base->nobj(), fiber);
  E.trans.assign(base->nmor(), identity_functor(fiber));
  return E;
}

inline int find_functor(const FunctorCategory& FC, const FinFunctor& F) {
  for (int i = 0; i < int(FC.objs.size()); ++i)
    if (same_functor(FC.objs[i], F)) return i;
  throw std::logic_error("functor not found in enumeration");
}

inline int find_nat(const FunctorCategory& FC, int from, int to, const std::vector<int>& comp) {
  for (int m : FC.cat->hom(from, to))
    if (FC.mors[m].comp == comp) return m;
  throw std::logic_error("natural transformation not found in enumeration");
}

// Functor from Fun(I, A) to Fun(J, B) given by X -> post ∘ X ∘ pre.
inline FinFunctor functor_category_map(const FunctorCategory& src, const FunctorCategory& tgt, const FinFunctor* post,
                                       const FinFunctor* pre) {
  FinFunctor R{src.cat, tgt.cat, {}, {}};
  auto conj = [&](const FinFunctor& X) {
    FinFunctor Y = X;
    if (pre) Y = compose(Y, *pre);
    if (post) Y = compose(*post, Y);
    return Y;
  };
  for (auto& X : src.objs) R.obj.push_back(find_functor(tgt, conj(X)));
  for (int m = 0; m < src.cat->nmor(); ++m) {
    NatTrans t = src.mors[m];
    if (pre) t = whisker_right(t, *pre);
    if (post) t = whisker_left(*post, t);
    R.mor.push_back(find_nat(tgt, R.obj[src.cat->src[m]], R.obj[src.cat->tgt[m]], t.comp));
  }
  return R;
}

struct PoweredFamily {
  CatFamily family;
  std::vector<FunctorCategory> fibers;
};

// Fibers Fun(I, E(c)), transitions by postcomposition.
inline PoweredFamily power(const CatFamily& E, const Cat& I) {
  PoweredFamily P;
  P.family.base = E.base;
  P.family.contravariant = E.contravariant;
  for (auto& F : E.fiber) {
    P.fibers.push_back(functor_category(I, F));
    P.family.fiber.push_back(P.fibers.back().cat);
  }
  for (int f = 0; f < E.base->nmor(); ++f)
    P.family.trans.push_back(
        functor_category_map(P.fibers[E.trans_src(f)], P.fibers[E.trans_tgt(f)], &E.trans[f], nullptr));
  return P;
}

// F contravariant, O covariant over the same base: fibers Fun(O(c), F(c)),
// transition along f: c -> c' sends X to F(f) ∘ X ∘ O(f).
inline PoweredFamily power_fib(const CatFamily& F, const CatFamily& O) {
  if (!F.contravariant || O.contravariant) throw std::invalid_argument("power_fib needs a fibration and an opfibration");
  PoweredFamily P;
  P.family.base = F.base;
  P.family.contravariant = true;
  for (int c = 0; c < F.base->nobj(); ++c) {
    P.fibers.push_back(functor_category(O.fiber[c], F.fiber[c]));
    P.family.fiber.push_back(P.fibers.back().cat);
  }
  for (int f = 0; f < F.base->nmor(); ++f) {
    int c = F.base->src[f], c2 = F.base->tgt[f];
    P.family.trans.push_back(functor_category_map(P.fibers[c2], P.fibers[c], &F.trans[f], &O.trans[f]));
  }
  return P;
}

// Section: obj[c] in fiber c; mor[f] the fiber component
// (covariant: f_! s(c) -> s(c'); contravariant: s(c) -> f^* s(c')).
struct CatSection {
  std::vector<int> obj, mor;
};

inline std::vector<std::string> check_section(const CatFamily& E, const CatSection& s) {
  std::vector<std::string> bad;
  const auto& B = *E.base;
  for (int f = 0; f < B.nmor(); ++f) {
    int a = s.mor[f];
    int src, tgt;
    const FinCategory* fib;
    if (E.contravariant) {
      fib = E.fiber[B.src[f]].get();
      src = s.obj[B.src[f]];
      tgt = E.trans[f].obj[s.obj[B.tgt[f]]];
    } else {
      fib = E.fiber[B.tgt[f]].get();
      src = E.trans[f].obj[s.obj[B.src[f]]];
      tgt = s.obj[B.tgt[f]];
    }
    if (a < 0 || fib->src[a] != src || fib->tgt[a] != tgt) bad.push_back("component at " + B.mor_names[f] + " has wrong endpoints");
  }
  if (!bad.empty()) return bad;
  for (int c = 0; c < B.nobj(); ++c)
    if (s.mor[B.ident[c]] != E.fiber[c]->ident[s.obj[c]]) bad.push_back("identity of " + B.obj_names[c] + " not preserved");
  for (int f = 0; f < B.nmor(); ++f)
    for (int g = 0; g < B.nmor(); ++g) {
      int gf = B.comp[g][f];
      if (gf < 0) continue;
      int want;
      if (E.contravariant)
        want = E.fiber[B.src[f]]->comp[E.trans[f].mor[s.mor[g]]][s.mor[f]];
      else
        want = E.fiber[B.tgt[g]]->comp[s.mor[g]][E.trans[g].mor[s.mor[f]]];
      if (s.mor[gf] != want) bad.push_back("section not functorial on " + B.mor_names[g] + "∘" + B.mor_names[f]);
    }
  return bad;
}

inline std::vector<CatSection> enumerate_sections(const CatFamily& E, std::size_t limit = 200000) {
  const auto& B = *E.base;
  std::vector<CatSection> out;
  CatSection s{std::vector<int>(B.nobj(), -1), std::vector<int>(B.nmor(), -1)};
  std::vector<int> order;
  for (int f = 0; f < B.nmor(); ++f)
    if (!B.is_identity(f)) order.push_back(f);
  std::function<void(int)> mrec = [&](int k) {
    if (out.size() >= limit) return;
    if (k == int(order.size())) {
      if (check_section(E, s).empty()) out.push_back(s);
      return;
    }
    int f = order[k];
    const std::vector<int>* cands;
    if (E.contravariant)
      cands = &E.fiber[B.src[f]]->hom(s.obj[B.src[f]], E.trans[f].obj[s.obj[B.tgt[f]]]);
    else
      cands = &E.fiber[B.tgt[f]]->hom(E.trans[f].obj[s.obj[B.src[f]]], s.obj[B.tgt[f]]);
    for (int a : *cands) {
      s.mor[f] = a;
      mrec(k + 1);
    }
    s.mor[f] = -1;
  };
  std::function<void(int)> orec = [&](int c) {
    if (c == B.nobj()) {
      for (int b = 0; b < B.nobj(); ++b) s.mor[B.ident[b]] = E.fiber[b]->ident[s.obj[b]];
      mrec(0);
      return;
    }
    for (int x = 0; x < E.fiber[c]->nobj(); ++x) {
      s.obj[c] = x;
      orec(c + 1);
    }
  };
  orec(0);
  return out;
}

// Section of F^O over C -> section of q^*F over the total of O.
inline CatSection power_section_to_total(const CatFamily& F, const CatFamily& O, const PoweredFamily& FO,
                                         const Total& TO, const CatSection& S) {
  CatSection r;
  for (auto& [c, x] : TO.obj) r.obj.push_back(FO.fibers[c].objs[S.obj[c]].obj[x]);
  for (int m = 0; m < int(TO.mor.size()); ++m) {
    auto [f, a] = TO.mor[m];
    int c = F.base->src[f], c2 = F.base->tgt[f];
    int x = TO.obj[TO.cat->src[m]].second;
    // S(f) is a transformation X_c -> F(f)∘X_{c'}∘O(f); then F(f)(X_{c'}(a))
    const auto& nat = FO.fibers[c].mors[S.mor[f]];
    int comp_x = nat.comp[x];
    const auto& Xc2 = FO.fibers[c2].objs[S.obj[c2]];
    int tail = F.trans[f].mor[Xc2.mor[a]];
    r.mor.push_back(F.fiber[c]->comp[tail][comp_x]);
  }
  return r;
}

// Restriction along alpha: F => G (functors D -> C) for a contravariant
// family q: at d it is the transition q(alpha_d): q(G d) -> q(F d).
inline std::vector<FinFunctor> restriction_map(const NatTrans& alpha, const CatFamily& q) {
  if (!q.contravariant) throw std::invalid_argument("restriction_map needs a fibration");
  std::vector<FinFunctor> R;
  for (int m : alpha.comp) R.push_back(q.trans[m]);
  return R;
}

// Components A(alpha_d): A(F d) -> alpha_d^* A(G d).
inline std::vector<int> section_comparison(const NatTrans& alpha, const CatFamily& q, const CatSection& A) {
  std::vector<int> r;
  for (int m : alpha.comp) r.push_back(A.mor[m]);
  return r;
}

// Naturality of the comparison in the fiber over F d for every u: d -> d'.
inline std::vector<std::string> check_comparison_naturality(const NatTrans& alpha, const CatFamily& q,
                                                            const CatSection& A) {
  std::vector<std::string> bad;
  const auto& D = *alpha.from.src;
  const auto& C = *q.base;
  auto theta = section_comparison(alpha, q, A);
  for (int u = 0; u < D.nmor(); ++u) {
    int d = D.src[u], d2 = D.tgt[u];
    int Fu = alpha.from.mor[u], Gu = alpha.to.mor[u];
    const auto& fib = *q.fiber[alpha.from.obj[d]];
    // (Fu)^*(theta_{d'}) ∘ A(Fu)
    int lhs = fib.comp[q.trans[Fu].mor[theta[d2]]][A.mor[Fu]];
    // alpha_d^*(A(Gu)) ∘ theta_d
    int rhs = fib.comp[q.trans[alpha.comp[d]].mor[A.mor[Gu]]][theta[d]];
    if (lhs != rhs) bad.push_back("comparison not natural at " + D.mor_names[u]);
    (void)C;
  }
  return bad;
}

// ===========================================================================
// CHAIN-valued strict opfibrations

template <class K>
using FiberObj = std::vector<Word<K>>;

template <class K>
struct FiberMap {
  FiberObj<K> src, tgt;
  std::vector<ChainMap<K>> comps;  // per slot, between word complexes
};

template <class K>
Cx<K> slot_cx(const FiberObj<K>& x, int s) {
  return word_cx(x[s])->cx;
}

template <class K>
FiberMap<K> fiber_identity(const FiberObj<K>& x) {
  FiberMap<K> f{x, x, {}};
  for (int s = 0; s < int(x.size()); ++s) f.comps.push_back(identity_map(slot_cx(x, s)));
  return f;
}

template <class K>
FiberMap<K> fiber_compose(const FiberMap<K>& g, const FiberMap<K>& f) {
  if (f.comps.size() != g.comps.size()) throw std::invalid_argument("fiber_compose: arity mismatch");
  FiberMap<K> h{f.src, g.tgt, {}};
  for (std::size_t s = 0; s < f.comps.size(); ++s) h.comps.push_back(compose(g.comps[s], f.comps[s]));
  return h;
}

template <class K>
bool fiber_maps_equal(const FiberMap<K>& a, const FiberMap<K>& b) {
  if (a.comps.size() != b.comps.size()) return false;
  for (std::size_t s = 0; s < a.comps.size(); ++s)
    if (!maps_equal(a.comps[s], b.comps[s])) return false;
  return true;
}

template <class K>
bool fiber_is_quasi_iso(const FiberMap<K>& f) {
  for (auto& c : f.comps)
    if (!is_quasi_iso(c)) return false;
  return true;
}

template <class K>
bool same_fiber_obj(const FiberObj<K>& a, const FiberObj<K>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t s = 0; s < a.size(); ++s)
    if (!same_complex(slot_cx(a, s), slot_cx(b, s))) return false;
  return true;
}

template <class K>
struct SlotTransition {
  std::vector<int> slot_map;          // source slot -> target slot or -1
  std::vector<Word<K>> extras;        // per target slot
  int tgt_arity() const { return int(extras.size()); }
};

template <class K>
bool same_transition(const SlotTransition<K>& a, const SlotTransition<K>& b) {
  return a.slot_map == b.slot_map && a.extras == b.extras;
}

// b ∘ a
template <class K>
SlotTransition<K> compose_transition(const SlotTransition<K>& b, const SlotTransition<K>& a) {
  SlotTransition<K> r;
  for (int t : a.slot_map) r.slot_map.push_back(t < 0 ? -1 : b.slot_map[t]);
  r.extras = b.extras;
  std::vector<Word<K>> cat(b.tgt_arity());
  for (int t = 0; t < a.tgt_arity(); ++t) {
    int u = b.slot_map[t];
    if (u < 0) continue;
    cat[u].insert(cat[u].end(), a.extras[t].begin(), a.extras[t].end());
  }
  for (int u = 0; u < b.tgt_arity(); ++u) {
    cat[u].insert(cat[u].end(), b.extras[u].begin(), b.extras[u].end());
    r.extras[u] = sorted_word(cat[u]);
  }
  return r;
}

enum class ChainKind { Constant, Twist, MTensor, Pullback };

template <class K>
struct ChainOpfib {
  Cat base;
  ChainKind kind = ChainKind::Constant;
  std::vector<int> arity;
  std::vector<SlotTransition<K>> trans;  // per base morphism
  // twist data
  std::vector<int> grade;
  Cx<K> twist;
  std::string name;
};

template <class K>
constexpr std::int64_t twist_key_base() {
  return std::int64_t(1) << 40;
}

template <class K>
ChainOpfib<K> constant_opfib(const Cat& base) {
  ChainOpfib<K> E;
  E.base = base;
  E.kind = ChainKind::Constant;
  E.arity.assign(base->nobj(), 1);
  for (int f = 0; f < base->nmor(); ++f) E.trans.push_back({{0}, {{}}});
  E.name = "constant";
  return E;
}

// Transition along f tensors with V once per grade level in [g(src), g(tgt)).
template <class K>
ChainOpfib<K> twist_opfib(const Cat& base, const std::vector<int>& grade, const Cx<K>& V) {
  ChainOpfib<K> E;
  E.base = base;
  E.kind = ChainKind::Twist;
  E.grade = grade;
  E.twist = V;
  E.arity.assign(base->nobj(), 1);
  for (int f = 0; f < base->nmor(); ++f) {
    int a = grade[base->src[f]], b = grade[base->tgt[f]];
    if (b < a) throw std::invalid_argument("twist grades must not decrease along morphisms");
    Word<K> w;
    for (int l = a; l < b; ++l) w.push_back({twist_key_base<K>() + l, V});
    E.trans.push_back({{0}, {w}});
  }
  E.name = "twist";
  return E;
}

template <class K>
ChainOpfib<K> mtensor_opfib(const FinStar& F) {
  ChainOpfib<K> E;
  E.base = F.cat;
  E.kind = ChainKind::MTensor;
  for (int n = 0; n < F.cat->nobj(); ++n) E.arity.push_back(n);
  for (int f = 0; f < F.cat->nmor(); ++f) E.trans.push_back({F.pmap[f], std::vector<Word<K>>(F.cat->tgt[f])});
  E.name = "mtensor";
  return E;
}

template <class K>
ChainOpfib<K> pullback(const FinFunctor& G, const ChainOpfib<K>& E) {
  ChainOpfib<K> P;
  P.base = G.src;
  P.kind = E.kind == ChainKind::MTensor ? ChainKind::Pullback : E.kind;
  for (int d : G.obj) P.arity.push_back(E.arity[d]);
  for (int u : G.mor) P.trans.push_back(E.trans[u]);
  if (!E.grade.empty())
    for (int d : G.obj) P.grade.push_back(E.grade[d]);
  P.twist = E.twist;
  P.name = E.name;
  return P;
}

// Transition along the opposite base is f_! again.
template <class K>
struct ChainFib {
  Cat base;  // opposite of the opfibration base
  ChainOpfib<K> op;
  const SlotTransition<K>& transition(int f_op) const { return op.trans[f_op]; }
};

template <class K>
ChainFib<K> transpose(const ChainOpfib<K>& E) {
  return ChainFib<K>{opposite(*E.base), E};
}

template <class K>
std::vector<std::string> check_strictness(const ChainOpfib<K>& E) {
  std::vector<std::string> bad;
  const auto& B = *E.base;
  for (int f = 0; f < B.nmor(); ++f) {
    const auto& t = E.trans[f];
    if (int(t.slot_map.size()) != E.arity[B.src[f]] || t.tgt_arity() != E.arity[B.tgt[f]])
      bad.push_back("transition along " + B.mor_names[f] + " has wrong arity");
  }
  if (!bad.empty()) return bad;
  for (int c = 0; c < B.nobj(); ++c) {
    const auto& t = E.trans[B.ident[c]];
    for (int s = 0; s < E.arity[c]; ++s)
      if (t.slot_map[s] != s || !t.extras[s].empty()) {
        bad.push_back("transition along identity of " + B.obj_names[c] + " is not the identity");
        break;
      }
  }
  for (int f = 0; f < B.nmor(); ++f)
    for (int g = 0; g < B.nmor(); ++g) {
      int gf = B.comp[g][f];
      if (gf >= 0 && !same_transition(compose_transition(E.trans[g], E.trans[f]), E.trans[gf]))
        bad.push_back("transitions not strictly functorial on " + B.mor_names[g] + "∘" + B.mor_names[f]);
    }
  return bad;
}

template <class K>
FiberObj<K> apply_obj(const SlotTransition<K>& t, const FiberObj<K>& x) {
  if (x.size() != t.slot_map.size()) throw std::invalid_argument("apply_obj: arity mismatch");
  std::vector<Word<K>> cat(t.tgt_arity());
  for (int s = 0; s < int(x.size()); ++s)
    if (t.slot_map[s] >= 0) cat[t.slot_map[s]].insert(cat[t.slot_map[s]].end(), x[s].begin(), x[s].end());
  FiberObj<K> r;
  for (int u = 0; u < t.tgt_arity(); ++u) {
    cat[u].insert(cat[u].end(), t.extras[u].begin(), t.extras[u].end());
    r.push_back(sorted_word(cat[u]));
  }
  return r;
}

template <class K>
bool is_identity_perm(const std::vector<int>& p) {
  for (int i = 0; i < int(p.size()); ++i)
    if (p[i] != i) return false;
  return true;
}

template <class K>
std::vector<int> inverse_perm(const std::vector<int>& p) {
  std::vector<int> q(p.size());
  for (int i = 0; i < int(p.size()); ++i) q[p[i]] = i;
  return q;
}

template <class K>
FiberMap<K> apply_map(const SlotTransition<K>& t, const FiberMap<K>& f) {
  FiberMap<K> r{apply_obj(t, f.src), apply_obj(t, f.tgt), {}};
  for (int u = 0; u < t.tgt_arity(); ++u) {
    std::vector<std::shared_ptr<const WordCx<K>>> srcs, tgts;
    std::vector<ChainMap<K>> fs;
    Word<K> cs, ct;
    for (int s = 0; s < int(f.src.size()); ++s) {
      if (t.slot_map[s] != u) continue;
      srcs.push_back(word_cx(f.src[s]));
      tgts.push_back(word_cx(f.tgt[s]));
      fs.push_back(f.comps[s]);
      cs.insert(cs.end(), f.src[s].begin(), f.src[s].end());
      ct.insert(ct.end(), f.tgt[s].begin(), f.tgt[s].end());
    }
    if (!t.extras[u].empty()) {
      auto e = word_cx(t.extras[u]);
      srcs.push_back(e);
      tgts.push_back(e);
      fs.push_back(identity_map(e->cx));
      cs.insert(cs.end(), t.extras[u].begin(), t.extras[u].end());
      ct.insert(ct.end(), t.extras[u].begin(), t.extras[u].end());
    }
    ChainMap<K> m;
    if (fs.size() == 1 && srcs[0]->word.size() == cs.size()) {
      m = fs[0];
    } else {
      m = tensor_maps(srcs, tgts, fs);
    }
    auto ps = sort_perm(cs), pt = sort_perm(ct);
    if (!is_identity_perm<K>(ps)) {
      Word<K> sorted;
      for (int p : ps) sorted.push_back(cs[p]);
      m = compose(m, permute_word(sorted, inverse_perm<K>(ps)));
    }
    if (!is_identity_perm<K>(pt)) m = compose(permute_word(ct, pt), m);
    // keep endpoints as the canonical word complexes
    m.src = slot_cx(r.src, u);
    m.tgt = slot_cx(r.tgt, u);
    r.comps.push_back(std::move(m));
  }
  return r;
}

// Iterated AW: C(Delta^n) -> C(Delta^n)^{(x) r} (r = 0: augmentation).
template <class K>
ChainMap<K> iterated_aw(int n, int r) {
  const auto& sc = simplex_chains<K>(n);
  Word<K> w;
  for (int i = 0; i < r; ++i) w.push_back({i, sc.cx});
  auto W = word_cx(w);
  ChainMap<K> res{sc.cx, W->cx, {}};
  for (int k = 0; k <= n; ++k) {
    Matrix<K> m(W->cx->dim(k), sc.cx->dim(k));
    for (auto& [v, id] : sc.id) {
      if (int(v.size()) != k + 1) continue;
      if (r == 0) {
        if (k == 0) m(0, id) = K(1);
        continue;
      }
      // cut points 0 <= i_1 <= ... <= i_{r-1} <= k
      std::vector<int> cut(r + 1, 0);
      cut[r] = k;
      std::function<void(int)> rec = [&](int j) {
        if (j == r) {
          std::vector<int> tup;
          for (int a = 0; a < r; ++a) {
            std::vector<int> piece(v.begin() + cut[a], v.begin() + cut[a + 1] + 1);
            int dg = cut[a + 1] - cut[a];
            tup.push_back(sc.cx->flat_offset(dg) + sc.id.at(piece));
          }
          m(W->index.at(tup).second, id) += K(1);
          return;
        }
        for (int c = cut[j - 1]; c <= k; ++c) {
          cut[j] = c;
          rec(j + 1);
        }
      };
      if (r == 1) {
        m(W->index.at({sc.cx->flat_offset(k) + id}).second, id) = K(1);
      } else {
        rec(1);
      }
    }
    res.comps[k] = m;
  }
  return res;
}

// Delta-structure m(n, x): C(Delta^n) (x) f_! x -> f_!(C(Delta^n) (x) x), slot u.
// Source word [D] ++ (f_! x)_u, target word concat_s([D] ++ x_s) ++ extras.
template <class K>
ChainMap<K> delta_structure(const SlotTransition<K>& t, const FiberObj<K>& x, int n, int u) {
  const auto& sc = simplex_chains<K>(n);
  const std::int64_t dkey = -1000;
  Atom<K> D{dkey, sc.cx};
  auto fx = apply_obj(t, x);
  Word<K> src{D};
  src.insert(src.end(), fx[u].begin(), fx[u].end());
  // unsort the f_! x part
  Word<K> cs;
  std::vector<int> srcslots;
  for (int s = 0; s < int(x.size()); ++s)
    if (t.slot_map[s] == u) {
      srcslots.push_back(s);
      cs.insert(cs.end(), x[s].begin(), x[s].end());
    }
  cs.insert(cs.end(), t.extras[u].begin(), t.extras[u].end());
  auto ps = sort_perm(cs);
  Word<K> sorted{D};
  for (int p : ps) sorted.push_back(cs[p]);
  std::vector<int> unsort{0};
  for (int p : inverse_perm<K>(ps)) unsort.push_back(p + 1);
  auto step1 = permute_word(sorted, unsort);  // [D] ++ cs
  int r = int(srcslots.size());
  // AW^{(r)} on D, identity on the rest
  auto aw = iterated_aw<K>(n, r);
  Word<K> dr;
  for (int i = 0; i < r; ++i) dr.push_back({dkey, sc.cx});
  auto rest = word_cx(cs);
  auto step2 = tensor_maps<K>({word_cx<K>({D}), rest}, {word_cx(dr), rest}, {aw, identity_map(rest->cx)});
  // interleave [D x r] ++ x_1 ++ ... ++ x_r ++ E  ->  [D, x_1, D, x_2, ...] ++ E
  Word<K> mid = dr;
  mid.insert(mid.end(), cs.begin(), cs.end());
  std::vector<int> perm;
  int pos = r;
  for (int i = 0; i < r; ++i) {
    perm.push_back(i);
    for (std::size_t a = 0; a < x[srcslots[i]].size(); ++a) perm.push_back(pos++);
  }
  for (std::size_t a = 0; a < t.extras[u].size(); ++a) perm.push_back(pos++);
  auto step3 = permute_word(mid, perm);
  return compose(step3, compose(step2, step1));
}

// ---------------------------------------------------------------------------
// Sections of CHAIN opfibrations: obj[c], mor[f]: f_! obj[src] -> obj[tgt]

template <class K>
struct ChainSection {
  std::vector<FiberObj<K>> obj;
  std::vector<FiberMap<K>> mor;
};

template <class K>
std::vector<std::string> check_chain_section(const ChainOpfib<K>& E, const ChainSection<K>& S) {
  std::vector<std::string> bad;
  const auto& B = *E.base;
  for (int f = 0; f < B.nmor(); ++f) {
    const auto& m = S.mor[f];
    if (!same_fiber_obj(m.src, apply_obj(E.trans[f], S.obj[B.src[f]])) || !same_fiber_obj(m.tgt, S.obj[B.tgt[f]]))
      bad.push_back("component at " + B.mor_names[f] + " has wrong endpoints");
    else
      for (auto& c : m.comps)
        if (!is_chain_map(c)) bad.push_back("component at " + B.mor_names[f] + " is not a chain map");
  }
  if (!bad.empty()) return bad;
  for (int c = 0; c < B.nobj(); ++c)
    if (!fiber_maps_equal(S.mor[B.ident[c]], fiber_identity(S.obj[c])))
      bad.push_back("identity of " + B.obj_names[c] + " not preserved");
  for (int f = 0; f < B.nmor(); ++f)
    for (int g = 0; g < B.nmor(); ++g) {
      int gf = B.comp[g][f];
      if (gf < 0) continue;
      auto want = fiber_compose(S.mor[g], apply_map(E.trans[g], S.mor[f]));
      if (!fiber_maps_equal(S.mor[gf], want)) bad.push_back("section not functorial on " + B.mor_names[g] + "∘" + B.mor_names[f]);
    }
  return bad;
}

// ---------------------------------------------------------------------------
// Commutative dg algebras

template <class K>
struct DgAlgebra {
  Cx<K> A;
  ChainMap<K> mu;   // tensor(A, A) -> A
  ChainMap<K> eta;  // k -> A
};

template <class K>
std::vector<std::string> check_algebra(const DgAlgebra<K>& R) {
  std::vector<std::string> bad;
  auto A = R.A;
  auto AA = tensor(A, A);
  if (!same_complex(R.mu.src, AA) || !same_complex(R.mu.tgt, A) || !is_chain_map(R.mu)) {
    bad.push_back("multiplication is not a chain map A⊗A -> A");
    return bad;
  }
  if (!is_chain_map(R.eta) || !same_complex(R.eta.tgt, A)) {
    bad.push_back("unit is not a chain map k -> A");
    return bad;
  }
  auto w0 = word_cx<K>({{0, A}}), w1 = word_cx<K>({{1, A}}), w2 = word_cx<K>({{2, A}});
  auto w01 = word_cx<K>({{0, A}, {1, A}}), w12 = word_cx<K>({{1, A}, {2, A}});
  auto mu = R.mu;
  auto l = compose(mu, tensor_maps<K>({w01, w2}, {w0, w1}, {mu, identity_map(A)}));
  auto mu12 = mu;
  mu12.src = w12->cx;
  auto r = tensor_maps<K>({w0, w12}, {w0, w1}, {identity_map(A), mu12});
  r.tgt = AA;
  auto rr = compose(mu, r);
  if (!maps_equal(l, rr)) bad.push_back("multiplication is not associative");
  auto k = unit_complex<K>();
  auto wk = word_cx<K>({{0, k}});
  auto ul = tensor_maps<K>({wk, w1}, {w0, w1}, {R.eta, identity_map(A)});
  ul.tgt = AA;
  auto left = compose(mu, ul);
  auto ur = tensor_maps<K>({w0, word_cx<K>({{1, k}})}, {w0, w1}, {identity_map(A), R.eta});
  ur.tgt = AA;
  auto right = compose(mu, ur);
  for (int n = A->lo; n <= A->hi(); ++n) {
    if (left.at(n) != Matrix<K>::identity(A->dim(n))) bad.push_back("left unit law fails in degree " + std::to_string(n));
    if (right.at(n) != Matrix<K>::identity(A->dim(n))) bad.push_back("right unit law fails in degree " + std::to_string(n));
  }
  auto sw = permute_word<K>({{0, A}, {1, A}}, {1, 0});
  sw.tgt = AA;
  if (!maps_equal(compose(mu, sw), mu)) bad.push_back("multiplication is not graded commutative");
  return bad;
}

// k[t]/t^2 in degree 0
template <class K>
DgAlgebra<K> dual_numbers() {
  auto A = make_complex<K>(0, {2});
  auto AA = tensor(A, A);
  ChainMap<K> mu{AA, A, {}};
  Matrix<K> m(2, 4);
  // basis tuples (a,b) in lexicographic order: 11, 1t, t1, tt
  m(0, 0) = K(1);
  m(1, 1) = K(1);
  m(1, 2) = K(1);
  mu.comps[0] = m;
  ChainMap<K> eta{unit_complex<K>(), A, {}};
  Matrix<K> e(2, 1);
  e(0, 0) = K(1);
  eta.comps[0] = e;
  return {A, mu, eta};
}

template <class K>
DgAlgebra<K> ground_field_algebra() {
  auto A = unit_complex<K>();
  auto AA = tensor(A, A);
  ChainMap<K> mu{AA, A, {}};
  mu.comps[0] = Matrix<K>::identity(1);
  return {A, mu, identity_map(A)};
}

// mu^{(r)}: A^{(x) r} -> A (r = 0: the unit)
template <class K>
ChainMap<K> iterated_mu(const DgAlgebra<K>& R, int r) {
  if (r == 0) return R.eta;
  Word<K> w{{0, R.A}};
  ChainMap<K> acc = identity_map(R.A);
  for (int i = 1; i < r; ++i) {
    auto left = word_cx(w);
    auto next = word_cx<K>({{i, R.A}});
    auto step = tensor_maps<K>({left, next}, {word_cx<K>({{0, R.A}}), word_cx<K>({{1, R.A}})}, {acc, identity_map(R.A)});
    step.tgt = tensor(R.A, R.A);
    acc = compose(R.mu, step);
    w.push_back({i, R.A});
    acc.src = word_cx(w)->cx;
  }
  return acc;
}

inline std::int64_t algebra_key(int n, int slot) { return std::int64_t(n) * 16 + slot; }

// S(n) = (A, ..., A); on f the component at t is mu over the preimage of t.
template <class K>
ChainSection<K> algebra_to_section(const FinStar& F, const ChainOpfib<K>& E, const DgAlgebra<K>& R) {
  if (!check_algebra(R).empty()) throw std::invalid_argument("algebra_to_section: input is not a commutative dg algebra");
  ChainSection<K> S;
  const auto& B = *F.cat;
  for (int n = 0; n < B.nobj(); ++n) {
    FiberObj<K> x;
    for (int s = 0; s < n; ++s) x.push_back({{algebra_key(n, s), R.A}});
    S.obj.push_back(x);
  }
  for (int f = 0; f < B.nmor(); ++f) {
    int n = B.src[f], m = B.tgt[f];
    FiberMap<K> fm{apply_obj(E.trans[f], S.obj[n]), S.obj[m], {}};
    for (int t = 0; t < m; ++t) {
      int r = int(F.preimage(f, t).size());
      auto mu = iterated_mu(R, r);
      mu.src = slot_cx(fm.src, t);
      mu.tgt = slot_cx(fm.tgt, t);
      fm.comps.push_back(mu);
    }
    S.mor.push_back(fm);
  }
  return S;
}

}  // namespace dsec

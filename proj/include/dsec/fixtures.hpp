#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dsec/push.hpp"

namespace dsec {

// {p0 < p1 < q} -> {x < y}; fibers {p0 < p1} over x and {q} over y.
struct CollapseFixture {
  Cat D, C;
  FinFunctor F;
};

inline CollapseFixture collapse_fixture() {
  CollapseFixture X;
  X.D = poset(3, {{0, 1}, {0, 2}, {1, 2}}, {"p0", "p1", "q"});
  X.C = poset(2, {{0, 1}}, {"x", "y"});
  X.F = functor_on_objects(X.D, X.C, {0, 0, 1});
  return X;
}

template <class K>
Cx<K> ground() {
  return make_complex<K>(0, {1});
}

// k ⊕ k[1] with zero differential
template <class K>
Cx<K> split_twist() {
  return make_complex<K>(0, {1, 1});
}

// cone(id_k): k in degrees 0 and 1, d = 1
template <class K>
Cx<K> acyclic_cone() {
  std::map<int, Matrix<K>> d;
  d[1] = Matrix<K>::identity(1);
  return make_complex<K>(0, {1, 1}, d);
}

template <class K>
ChainOpfib<K> collapse_opfib(const Cat& C, bool twist) {
  if (!twist) return constant_opfib<K>(C);
  std::vector<int> g;
  for (int c = 0; c < C->nobj(); ++c) g.push_back(c);
  return twist_opfib<K>(C, g, split_twist<K>());
}

// Strict section over a poset base: S(c) = (c_0 -> c)_! k when c_0 is
// initial, identity components otherwise trivial.
template <class K>
ChainSection<K> pushed_ground_section(const ChainOpfib<K>& E, int c0) {
  const auto& C = *E.base;
  ChainSection<K> S;
  FiberObj<K> k0{{{1, ground<K>()}}};
  for (int c = 0; c < C.nobj(); ++c) {
    const auto& h = C.hom(c0, c);
    if (h.size() != 1) throw std::invalid_argument("pushed_ground_section: base object is not initial");
    S.obj.push_back(apply_obj(E.trans[h[0]], k0));
  }
  for (int f = 0; f < C.nmor(); ++f) S.mor.push_back(fiber_identity(S.obj[C.tgt[f]]));
  return S;
}

template <class K>
ChainMap<K> reindex_into_atom(const Word<K>& u, const SumCx<K>& sum, const Word<K>& e) {
  Word<K> sw = u;
  sw.insert(sw.end(), e.begin(), e.end());
  Word<K> tw{{0, sum.cx}};
  tw.insert(tw.end(), e.begin(), e.end());
  auto S = word_cx(sw), T = word_cx(tw), U = word_cx(u);
  int nu = int(u.size());
  ChainMap<K> r{S->cx, T->cx, {}};
  for (int m = S->cx->lo; m <= S->cx->hi(); ++m) {
    Matrix<K> M(T->cx->dim(m), S->cx->dim(m));
    for (int col = 0; col < S->cx->dim(m); ++col) {
      const auto& tup = S->tup[m - S->cx->lo][col];
      auto [mu, iu] = U->index.at(std::vector<int>(tup.begin(), tup.begin() + nu));
      std::vector<int> tt{sum.cx->flat_offset(mu) + sum_off(sum, 0, mu) + iu};
      tt.insert(tt.end(), tup.begin() + nu, tup.end());
      M(T->index.at(tt).second, col) = K(1);
    }
    r.comps[m] = std::move(M);
  }
  return r;
}

// Values on chains of length >= 1 become A(c) ⊕ P in a single atom; P
// survives only along identities, so anchors stay quasi-isos when P is acyclic.
template <class K>
Presection<K> pad_presection(const Presection<K>& A, const Cx<K>& P) {
  require_pushable(A.E);
  const auto& R = *A.R;
  Presection<K> B;
  B.E = A.E;
  B.R = A.R;
  std::vector<std::shared_ptr<SumCx<K>>> sums(R.objs.size());
  for (int s = 0; s < int(R.objs.size()); ++s) {
    if (R.objs[s].length() == 0) {
      B.val.push_back(A.val[s]);
      continue;
    }
    sums[s] = std::make_shared<SumCx<K>>(direct_sum<K>({word_cx(A.val[s][0])->cx, P}));
    B.val.push_back({{{0, sums[s]->cx}}});
  }
  for (int m = 0; m < int(R.mors.size()); ++m) {
    const auto& p = R.mors[m];
    int t = A.tmor(m);
    const auto& e = A.E.trans[t].extras[0];
    auto tgt = apply_obj(A.E.trans[t], B.val[p.tgt]);
    if (is_identity_amap(p.a, R.objs[p.src].length()) && sums[p.src]) {
      B.comp.push_back({B.val[p.src], tgt, {identity_map(sums[p.src]->cx)}});
      continue;
    }
    auto g = A.comp[m].comps[0];
    if (sums[p.src]) g = compose(g, projection(*sums[p.src], 0));
    if (sums[p.tgt]) g = compose(reindex_into_atom(A.val[p.tgt][0], *sums[p.tgt], e), g);
    B.comp.push_back({B.val[p.src], tgt, {g}});
  }
  return B;
}

// Section over D of the pulled-back opfibration on the collapse fixture,
// locally constant but not pulled back: p1 carries k ⊕ cone(id_k).
// With broken set, p1 carries 0 and the fiber morphism p0 -> p1 fails.
template <class K>
ChainSection<K> collapse_independent_section(const CollapseFixture& X, const ChainOpfib<K>& ED, bool broken = false) {
  const auto& D = *X.D;
  auto k = ground<K>();
  Cx<K> W;
  Matrix<K> inc(0, 0), pr(0, 0);
  if (broken) {
    W = zero_complex<K>();
  } else {
    std::map<int, Matrix<K>> d;
    Matrix<K> d1(2, 1);
    d1(1, 0) = K(1);
    d[1] = d1;
    W = make_complex<K>(0, {2, 1}, d);
  }
  FiberObj<K> sk{{{1, k}}}, sw{{{1, W}}};
  ChainMap<K> incl{k, W, {}}, proj{W, k, {}};
  if (!broken) {
    Matrix<K> i0(2, 1), p0(1, 2);
    i0(0, 0) = K(1);
    p0(0, 0) = K(1);
    incl.comps[0] = i0;
    proj.comps[0] = p0;
  } else {
    incl = zero_map(k, W);
    proj = zero_map(W, k);
  }
  int p0p1 = D.hom(0, 1)[0], p0q = D.hom(0, 2)[0], p1q = D.hom(1, 2)[0];
  ChainSection<K> S;
  S.obj = {sk, sw, apply_obj(ED.trans[p0q], sk)};
  S.mor.resize(D.nmor());
  for (int o = 0; o < D.nobj(); ++o) S.mor[D.ident[o]] = fiber_identity(S.obj[o]);
  S.mor[p0p1] = FiberMap<K>{sk, sw, {incl}};
  S.mor[p1q] = apply_map(ED.trans[p1q], FiberMap<K>{sw, sk, {proj}});
  auto id = apply_map(ED.trans[p0q], fiber_identity(sk));
  if (broken) id = apply_map(ED.trans[p0q], FiberMap<K>{sk, sk, {zero_map(k, k)}});
  S.mor[p0q] = id;
  return S;
}

}  // namespace dsec

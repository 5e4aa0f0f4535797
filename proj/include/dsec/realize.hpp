#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "dsec/chain.hpp"
#include "dsec/simp.hpp"

namespace dsec {

// ---------------------------------------------------------------------------
// Chains on simplicial sets

template <class K>
Cx<K> normalized_chains(const SimplicialSet& S, bool allow_truncated = false) {
  if (!S.exact && !allow_truncated)
    throw std::invalid_argument("normalized_chains: truncation at " + std::to_string(S.maxdim) + " is lossy");
  int top = std::min<int>(int(S.count.size()) - 1, S.maxdim);
  std::vector<int> dims;
  std::map<int, Matrix<K>> d;
  for (int p = 0; p <= top; ++p) dims.push_back(S.n_nondeg(p));
  for (int p = 1; p <= top; ++p) {
    Matrix<K> m(S.n_nondeg(p - 1), S.n_nondeg(p));
    for (int id = 0; id < S.n_nondeg(p); ++id)
      for (int i = 0; i <= p; ++i) {
        const auto& f = S.face[p][id][i];
        if (f.degenerate()) continue;
        m(f.base, id) += (i % 2) ? K(-1) : K(1);
      }
    d[p] = m;
  }
  return make_complex<K>(0, dims, d);
}

template <class K>
ChainMap<K> induced_chain_map(const SimplicialMap& f, const Cx<K>& src, const Cx<K>& tgt) {
  ChainMap<K> r{src, tgt, {}};
  for (int p = 0; p <= src->hi(); ++p) {
    Matrix<K> m(tgt->dim(p), src->dim(p));
    for (int id = 0; id < src->dim(p); ++id) {
      const auto& y = f.img[p][id];
      if (!y.degenerate()) m(y.base, id) = K(1);
    }
    r.comps[p] = m;
  }
  return r;
}

template <class K>
struct SimplexChains {
  SimplicialSet set;
  Cx<K> cx;
  std::map<std::vector<int>, int> id;  // vertex list -> index in its degree
};

template <class K>
const SimplexChains<K>& simplex_chains(int n) {
  static std::map<int, SimplexChains<K>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  SimplexChains<K> sc;
  sc.set = standard_simplex(n);
  sc.cx = normalized_chains<K>(sc.set);
  for (int k = 0; k <= n; ++k)
    for (int i = 0; i < sc.set.count[k]; ++i) sc.id[simplex_vertices(n, k, i)] = i;
  return cache.emplace(n, std::move(sc)).first->second;
}

// Alexander-Whitney: [v0..vk] -> sum_i [v0..vi] (x) [vi..vk]
template <class K>
ChainMap<K> aw_diagonal(int n) {
  const auto& sc = simplex_chains<K>(n);
  auto W = word_cx<K>({{0, sc.cx}, {1, sc.cx}});
  ChainMap<K> r{sc.cx, W->cx, {}};
  for (int k = 0; k <= n; ++k) {
    Matrix<K> m(W->cx->dim(k), sc.cx->dim(k));
    for (auto& [v, id] : sc.id) {
      if (int(v.size()) != k + 1) continue;
      for (int i = 0; i <= k; ++i) {
        std::vector<int> a(v.begin(), v.begin() + i + 1), b(v.begin() + i, v.end());
        int ga = sc.cx->flat_offset(i) + sc.id.at(a);
        int gb = sc.cx->flat_offset(k - i) + sc.id.at(b);
        m(W->index.at({ga, gb}).second, id) += K(1);
      }
    }
    r.comps[k] = m;
  }
  return r;
}

// C(Delta^n) -> k, vertices to 1
template <class K>
ChainMap<K> augmentation(int n) {
  const auto& sc = simplex_chains<K>(n);
  auto k = unit_complex<K>();
  ChainMap<K> r{sc.cx, k, {}};
  Matrix<K> m(1, sc.cx->dim(0));
  for (int i = 0; i < sc.cx->dim(0); ++i) m(0, i) = K(1);
  r.comps[0] = m;
  return r;
}

template <class K>
Cx<K> delta_tensor(int n, const Cx<K>& C) {
  return tensor(simplex_chains<K>(n).cx, C);
}

template <class K>
Cx<K> sset_tensor(const SimplicialSet& S, const Cx<K>& C) {
  return tensor(normalized_chains<K>(S), C);
}

// ---------------------------------------------------------------------------
// Surjection helpers

inline std::vector<int> compose_surj(const std::vector<int>& outer, const std::vector<int>& inner) {
  std::vector<int> r;
  for (int v : inner) r.push_back(outer[v]);
  return r;
}

inline bool is_identity_surj(const std::vector<int>& e) {
  for (int i = 0; i < int(e.size()); ++i)
    if (e[i] != i) return false;
  return true;
}

// Result of pushing face i through a surjection eta: either the face stays
// degenerate-only (nullopt j) with new surjection mu, or it hits base face j
// and mu is the reindexed surjection onto [p-1].
struct SurjFace {
  std::vector<int> mu;
  int j = -1;
};

inline SurjFace surj_face(const std::vector<int>& eta, int i) {
  int n = int(eta.size()) - 1;
  SurjFace r;
  for (int k = 0; k < n; ++k) r.mu.push_back(eta[k < i ? k : k + 1]);
  int j = eta[i];
  bool hit = (i > 0 && eta[i - 1] == j) || (i < n && eta[i + 1] == j);
  if (hit) return r;
  r.j = j;
  for (auto& v : r.mu)
    if (v > j) --v;
  return r;
}

// ---------------------------------------------------------------------------
// Free simplicial chain complexes presented by nondegenerate summands.
// An element of level n is s_eta(x) for x a summand of level p = max(eta).

template <class K>
struct FaceTerm {
  std::vector<int> eta;  // [n-1] -> [p]
  int tgt = 0;           // summand at level p
  ChainMap<K> map;
};

template <class K>
struct NSimp {
  std::vector<std::vector<Cx<K>>> lv;                                  // lv[n][s]
  std::vector<std::vector<std::vector<std::vector<FaceTerm<K>>>>> face;  // face[n][s][i], n >= 1

  int levels() const { return int(lv.size()); }
  int add_summand(int n, Cx<K> c) {
    if (int(lv.size()) <= n) {
      lv.resize(n + 1);
      face.resize(n + 1);
    }
    lv[n].push_back(std::move(c));
    face[n].emplace_back(n >= 1 ? n + 1 : 0);
    return int(lv[n].size()) - 1;
  }
};

// Apply face i to a term living in level n (given by its eta), summand t.
template <class K>
std::vector<FaceTerm<K>> face_terms(const NSimp<K>& X, const FaceTerm<K>& x, int i) {
  auto sf = surj_face(x.eta, i);
  if (sf.j < 0) return {FaceTerm<K>{sf.mu, x.tgt, x.map}};
  int p = int(x.eta.back());
  std::vector<FaceTerm<K>> out;
  for (auto& ft : X.face[p][x.tgt][sf.j]) out.push_back({compose_surj(ft.eta, sf.mu), ft.tgt, compose(ft.map, x.map)});
  return out;
}

template <class K>
using TermSum = std::map<std::pair<std::vector<int>, int>, ChainMap<K>>;

template <class K>
void accumulate(TermSum<K>& acc, const std::vector<FaceTerm<K>>& ts) {
  for (auto& t : ts) {
    auto key = std::make_pair(t.eta, t.tgt);
    auto it = acc.find(key);
    if (it == acc.end())
      acc.emplace(key, t.map);
    else
      it->second = add_maps(it->second, t.map);
  }
}

template <class K>
bool term_sums_equal(const TermSum<K>& a, const TermSum<K>& b) {
  auto nonzero = [](const ChainMap<K>& f) {
    for (auto& [n, m] : f.comps)
      if (!m.is_zero()) return true;
    return false;
  };
  for (auto& [k, f] : a) {
    auto it = b.find(k);
    if (it == b.end()) {
      if (nonzero(f)) return false;
    } else if (!maps_equal(f, it->second)) {
      return false;
    }
  }
  for (auto& [k, f] : b)
    if (!a.count(k) && nonzero(f)) return false;
  return true;
}

// Reports face maps that are not chain maps or break d_i d_j = d_{j-1} d_i.
template <class K>
std::vector<std::string> check_nsimp(const NSimp<K>& X) {
  std::vector<std::string> bad;
  for (int n = 1; n < X.levels(); ++n)
    for (int s = 0; s < int(X.lv[n].size()); ++s)
      for (int i = 0; i <= n; ++i)
        for (auto& t : X.face[n][s][i]) {
          if (int(t.eta.size()) != n || t.tgt >= int(X.lv[t.eta.back()].size())) {
            bad.push_back("level " + std::to_string(n) + " summand " + std::to_string(s) + " face " +
                          std::to_string(i) + ": bad target");
            continue;
          }
          if (!same_complex(t.map.src, X.lv[n][s]) || !same_complex(t.map.tgt, X.lv[t.eta.back()][t.tgt]) ||
              !is_chain_map(t.map))
            bad.push_back("level " + std::to_string(n) + " summand " + std::to_string(s) + " face " +
                          std::to_string(i) + ": not a chain map");
        }
  if (!bad.empty()) return bad;
  for (int n = 2; n < X.levels(); ++n)
    for (int s = 0; s < int(X.lv[n].size()); ++s) {
      FaceTerm<K> x{id_surj(n), s, identity_map(X.lv[n][s])};
      for (int j = 1; j <= n; ++j)
        for (int i = 0; i < j; ++i) {
          TermSum<K> a, b;
          for (auto& t : face_terms(X, x, j)) accumulate(a, face_terms(X, t, i));
          for (auto& t : face_terms(X, x, i)) accumulate(b, face_terms(X, t, j - 1));
          if (!term_sums_equal(a, b))
            bad.push_back("d" + std::to_string(i) + "d" + std::to_string(j) + " != d" + std::to_string(j - 1) + "d" +
                          std::to_string(i) + " at level " + std::to_string(n) + " summand " + std::to_string(s));
        }
    }
  return bad;
}

template <class K>
struct Realized {
  Cx<K> cx;
  // off[n][s][m]: offset of summand (n,s) internal degree m in total degree n+m
  std::vector<std::vector<std::map<int, int>>> off;
  int offset(int n, int s, int m) const {
    auto it = off[n][s].find(m);
    return it == off[n][s].end() ? 0 : it->second;
  }
};

// Total complex of the normalized Moore complex:
// on summand (n, s) in internal degree m, D = d_int + (-1)^m sum_i (-1)^i d_i.
template <class K>
Realized<K> realize(const NSimp<K>& X) {
  Realized<K> R;
  R.off.resize(X.levels());
  std::map<int, int> tot;  // total degree -> running dim
  bool any = false;
  int lo = 0, hi = -1;
  for (int n = 0; n < X.levels(); ++n) {
    R.off[n].resize(X.lv[n].size());
    for (int s = 0; s < int(X.lv[n].size()); ++s) {
      auto& c = *X.lv[n][s];
      for (int m = c.lo; m <= c.hi(); ++m) {
        if (!c.dim(m)) continue;
        R.off[n][s][m] = tot[n + m];
        tot[n + m] += c.dim(m);
        lo = any ? std::min(lo, n + m) : n + m;
        hi = any ? std::max(hi, n + m) : n + m;
        any = true;
      }
    }
  }
  if (!any) {
    R.cx = zero_complex<K>();
    return R;
  }
  std::vector<int> dims;
  for (int k = lo; k <= hi; ++k) dims.push_back(tot.count(k) ? tot[k] : 0);
  auto dimk = [&](int k) { return (k < lo || k > hi) ? 0 : dims[k - lo]; };
  std::map<int, Matrix<K>> d;
  for (int k = lo; k <= hi; ++k) d[k] = Matrix<K>(dimk(k - 1), dimk(k));
  for (int n = 0; n < X.levels(); ++n)
    for (int s = 0; s < int(X.lv[n].size()); ++s) {
      auto& c = *X.lv[n][s];
      for (int m = c.lo; m <= c.hi(); ++m) {
        if (!c.dim(m)) continue;
        int k = n + m, col = R.offset(n, s, m);
        if (c.dim(m - 1)) d[k].add_block(R.offset(n, s, m - 1), col, c.d(m));
        if (n == 0) continue;
        for (int i = 0; i <= n; ++i)
          for (auto& t : X.face[n][s][i]) {
            if (!is_identity_surj(t.eta)) continue;
            if (!X.lv[n - 1][t.tgt]->dim(m)) continue;
            K sg = ((m + i) % 2) ? K(-1) : K(1);
            d[k].add_block(R.offset(n - 1, t.tgt, m), col, t.map.at(m), sg);
          }
      }
    }
  R.cx = make_complex<K>(lo, dims, d);
  return R;
}

// Levelwise map X -> Y: blocks[n] = (tgt summand, src summand, map).
template <class K>
struct NSimpMap {
  std::vector<std::vector<std::tuple<int, int, ChainMap<K>>>> blocks;
};

template <class K>
ChainMap<K> realize_map(const Realized<K>& RX, const Realized<K>& RY, const NSimpMap<K>& f) {
  ChainMap<K> r{RX.cx, RY.cx, {}};
  for (int k = RX.cx->lo; k <= RX.cx->hi(); ++k) r.comps[k] = Matrix<K>(RY.cx->dim(k), RX.cx->dim(k));
  for (int n = 0; n < int(f.blocks.size()); ++n)
    for (auto& [t, s, g] : f.blocks[n])
      for (int m = g.src->lo; m <= g.src->hi(); ++m) {
        if (!g.src->dim(m) || !g.tgt->dim(m)) continue;
        r.comps[n + m].add_block(RY.offset(n, t, m), RX.offset(n, s, m), g.at(m));
      }
  return r;
}

// Inclusion of the level-0 summand s into the realization.
template <class K>
ChainMap<K> level0_inclusion(const NSimp<K>& X, const Realized<K>& R, int s) {
  auto& c = X.lv[0][s];
  ChainMap<K> r{c, R.cx, {}};
  for (int m = c->lo; m <= c->hi(); ++m) {
    Matrix<K> mm(R.cx->dim(m), c->dim(m));
    if (c->dim(m)) mm.add_block(R.offset(0, s, m), 0, Matrix<K>::identity(c->dim(m)));
    r.comps[m] = mm;
  }
  return r;
}

// Constant simplicial object at C: only level 0 is nondegenerate.
template <class K>
NSimp<K> constant_nsimp(const Cx<K>& C) {
  NSimp<K> X;
  X.add_summand(0, C);
  return X;
}

// ---------------------------------------------------------------------------
// Split augmentation: eps: X_0 -> X_{-1}, eta: X_{-1} -> X_0

template <class K>
struct SplitAugmented {
  NSimp<K> X;
  Cx<K> xm1;
  std::vector<ChainMap<K>> eps;  // per level-0 summand, X_0[s] -> X_{-1}
  ChainMap<K> eta;               // X_{-1} -> sum of level-0 summands
};

template <class K>
SumCx<K> level0_sum(const NSimp<K>& X) {
  return direct_sum(X.lv.empty() ? std::vector<Cx<K>>{} : X.lv[0]);
}

template <class K>
std::vector<std::string> check_split_augmented(const SplitAugmented<K>& A) {
  auto bad = check_nsimp(A.X);
  auto S0 = level0_sum(A.X);
  if (int(A.eps.size()) != int(S0.parts.size())) {
    bad.push_back("augmentation has wrong number of components");
    return bad;
  }
  for (auto& e : A.eps)
    if (!is_chain_map(e)) bad.push_back("augmentation is not a chain map");
  if (!is_chain_map(A.eta)) bad.push_back("extra degeneracy is not a chain map");
  std::vector<std::tuple<int, int, ChainMap<K>>> bl;
  SumCx<K> one = direct_sum<K>({A.xm1});
  for (int s = 0; s < int(A.eps.size()); ++s) bl.emplace_back(0, s, A.eps[s]);
  auto eps = block_map(S0, one, bl);
  auto ee = compose(eps, A.eta);
  if (!maps_equal(ee, identity_map(ee.src))) bad.push_back("eps∘eta != id");
  if (A.X.levels() > 1)
    for (int s = 0; s < int(A.X.lv[1].size()); ++s) {
      ChainMap<K> a = zero_map(A.X.lv[1][s], A.xm1), b = a;
      for (auto& t : A.X.face[1][s][0]) a = add_maps(a, compose(A.eps[t.tgt], t.map));
      for (auto& t : A.X.face[1][s][1]) b = add_maps(b, compose(A.eps[t.tgt], t.map));
      if (!maps_equal(a, b)) bad.push_back("eps∘d0 != eps∘d1 on level-1 summand " + std::to_string(s));
    }
  return bad;
}

template <class K>
struct SplitVerdict {
  ChainMap<K> in, out;  // X_{-1} -> |X| -> X_{-1}
  bool composite_identity = false, in_qi = false, out_qi = false;
  bool ok() const { return composite_identity && in_qi && out_qi; }
};

template <class K>
SplitVerdict<K> split_augmented_equivalence(const SplitAugmented<K>& A) {
  auto R = realize(A.X);
  auto S0 = level0_sum(A.X);
  SplitVerdict<K> v;
  v.in = ChainMap<K>{A.xm1, R.cx, {}};
  for (int m = A.xm1->lo; m <= A.xm1->hi(); ++m) {
    Matrix<K> mm(R.cx->dim(m), A.xm1->dim(m));
    auto em = A.eta.at(m);
    for (int s = 0; s < int(S0.parts.size()); ++s) {
      int ds = S0.parts[s]->dim(m);
      if (!ds) continue;
      mm.add_block(R.offset(0, s, m), 0, em.block(sum_off(S0, s, m), 0, ds, em.cols()));
    }
    v.in.comps[m] = mm;
  }
  v.out = ChainMap<K>{R.cx, A.xm1, {}};
  for (int m = R.cx->lo; m <= R.cx->hi(); ++m) {
    Matrix<K> mm(A.xm1->dim(m), R.cx->dim(m));
    for (int s = 0; s < int(S0.parts.size()); ++s)
      if (S0.parts[s]->dim(m) && A.xm1->dim(m)) mm.add_block(0, R.offset(0, s, m), A.eps[s].at(m));
    v.out.comps[m] = mm;
  }
  auto c = compose(v.out, v.in);
  v.composite_identity = maps_equal(c, identity_map(A.xm1));
  v.in_qi = is_chain_map(v.in) && is_quasi_iso(v.in);
  v.out_qi = is_chain_map(v.out) && is_quasi_iso(v.out);
  return v;
}

// ---------------------------------------------------------------------------
// Free bisimplicial chain complexes

template <class K>
struct NBisimp {
  std::vector<std::vector<std::vector<Cx<K>>>> lv;  // lv[p][q][s]
  // hface[p][q][s][i]: terms with eta [p-1] -> [p'], target in lv[p'][q]
  std::vector<std::vector<std::vector<std::vector<std::vector<FaceTerm<K>>>>>> hface, vface;

  int hlevels() const { return int(lv.size()); }
  int vlevels() const { return lv.empty() ? 0 : int(lv[0].size()); }
  void resize(int P, int Q) {
    lv.assign(P, std::vector<std::vector<Cx<K>>>(Q));
    hface.assign(P, std::vector<std::vector<std::vector<std::vector<FaceTerm<K>>>>>(Q));
    vface = hface;
  }
  int add_summand(int p, int q, Cx<K> c) {
    lv[p][q].push_back(std::move(c));
    hface[p][q].emplace_back(p >= 1 ? p + 1 : 0);
    vface[p][q].emplace_back(q >= 1 ? q + 1 : 0);
    return int(lv[p][q].size()) - 1;
  }
};

// Element of X_{n,m}: s_{e1} x s_{e2} applied to summand s of lv[p][q].
template <class K>
struct BiTerm {
  std::vector<int> e1, e2;
  int s = 0;
  ChainMap<K> map;
};

template <class K>
std::vector<BiTerm<K>> bi_face(const NBisimp<K>& X, const BiTerm<K>& x, int i, bool horizontal) {
  const auto& e = horizontal ? x.e1 : x.e2;
  auto sf = surj_face(e, i);
  if (sf.j < 0) {
    BiTerm<K> y = x;
    (horizontal ? y.e1 : y.e2) = sf.mu;
    return {y};
  }
  int p = x.e1.back(), q = x.e2.back();
  const auto& terms = horizontal ? X.hface[p][q][x.s][sf.j] : X.vface[p][q][x.s][sf.j];
  std::vector<BiTerm<K>> out;
  for (auto& t : terms) {
    BiTerm<K> y = x;
    (horizontal ? y.e1 : y.e2) = compose_surj(t.eta, sf.mu);
    y.s = t.tgt;
    y.map = compose(t.map, x.map);
    out.push_back(std::move(y));
  }
  return out;
}

template <class K>
using BiSum = std::map<std::tuple<std::vector<int>, std::vector<int>, int>, ChainMap<K>>;

template <class K>
void accumulate_bi(BiSum<K>& acc, const std::vector<BiTerm<K>>& ts) {
  for (auto& t : ts) {
    auto key = std::make_tuple(t.e1, t.e2, t.s);
    auto it = acc.find(key);
    if (it == acc.end())
      acc.emplace(key, t.map);
    else
      it->second = add_maps(it->second, t.map);
  }
}

template <class K>
bool bi_sums_equal(const BiSum<K>& a, const BiSum<K>& b) {
  TermSum<K> x, y;
  // reuse the flat comparison by folding keys
  std::map<std::tuple<std::vector<int>, std::vector<int>, int>, int> ids;
  auto fold = [&](const BiSum<K>& in, TermSum<K>& out) {
    for (auto& [k, f] : in) {
      int id = ids.emplace(k, int(ids.size())).first->second;
      out.emplace(std::make_pair(std::vector<int>{}, id), f);
    }
  };
  fold(a, x);
  fold(b, y);
  return term_sums_equal(x, y);
}

template <class K>
std::vector<std::string> check_nbisimp(const NBisimp<K>& X) {
  std::vector<std::string> bad;
  int P = X.hlevels(), Q = X.vlevels();
  for (int p = 0; p < P; ++p)
    for (int q = 0; q < Q; ++q)
      for (int s = 0; s < int(X.lv[p][q].size()); ++s) {
        for (int hv = 0; hv < 2; ++hv) {
          const auto& fs = hv == 0 ? X.hface[p][q][s] : X.vface[p][q][s];
          for (auto& face : fs)
            for (auto& t : face)
              if (!is_chain_map(t.map)) bad.push_back("face map is not a chain map");
        }
        BiTerm<K> x{id_surj(p), id_surj(q), s, identity_map(X.lv[p][q][s])};
        // horizontal identities
        for (int j = 1; j <= p && p >= 2; ++j)
          for (int i = 0; i < j; ++i) {
            BiSum<K> a, b;
            for (auto& t : bi_face(X, x, j, true)) accumulate_bi(a, bi_face(X, t, i, true));
            for (auto& t : bi_face(X, x, i, true)) accumulate_bi(b, bi_face(X, t, j - 1, true));
            if (!bi_sums_equal(a, b)) bad.push_back("horizontal identity fails at (" + std::to_string(p) + "," + std::to_string(q) + ")");
          }
        for (int j = 1; j <= q && q >= 2; ++j)
          for (int i = 0; i < j; ++i) {
            BiSum<K> a, b;
            for (auto& t : bi_face(X, x, j, false)) accumulate_bi(a, bi_face(X, t, i, false));
            for (auto& t : bi_face(X, x, i, false)) accumulate_bi(b, bi_face(X, t, j - 1, false));
            if (!bi_sums_equal(a, b)) bad.push_back("vertical identity fails at (" + std::to_string(p) + "," + std::to_string(q) + ")");
          }
        // horizontal and vertical faces commute
        for (int i = 0; i <= p && p >= 1; ++i)
          for (int j = 0; j <= q && q >= 1; ++j) {
            BiSum<K> a, b;
            for (auto& t : bi_face(X, x, i, true)) accumulate_bi(a, bi_face(X, t, j, false));
            for (auto& t : bi_face(X, x, j, false)) accumulate_bi(b, bi_face(X, t, i, true));
            if (!bi_sums_equal(a, b)) bad.push_back("faces do not commute at (" + std::to_string(p) + "," + std::to_string(q) + ")");
          }
      }
  return bad;
}

template <class K>
struct BiRealized {
  Cx<K> cx;
  std::map<std::tuple<int, int, int, int>, int> off;  // (p,q,s,k) -> offset in degree p+q+k
  int offset(int p, int q, int s, int k) const { return off.at({p, q, s, k}); }
};

// order 12: D = d_int + (-1)^k d_h + (-1)^{p+k} d_v
// order 21: D = d_int + (-1)^k d_v + (-1)^{q+k} d_h
template <class K>
BiRealized<K> realize_bisimplicial(const NBisimp<K>& X, int order) {
  if (order != 12 && order != 21) throw std::invalid_argument("order must be 12 or 21");
  BiRealized<K> R;
  std::map<int, int> tot;
  int lo = 0, hi = -1;
  bool any = false;
  int P = X.hlevels(), Q = X.vlevels();
  for (int p = 0; p < P; ++p)
    for (int q = 0; q < Q; ++q)
      for (int s = 0; s < int(X.lv[p][q].size()); ++s) {
        auto& c = *X.lv[p][q][s];
        for (int k = c.lo; k <= c.hi(); ++k) {
          if (!c.dim(k)) continue;
          int t = p + q + k;
          R.off[{p, q, s, k}] = tot[t];
          tot[t] += c.dim(k);
          lo = any ? std::min(lo, t) : t;
          hi = any ? std::max(hi, t) : t;
          any = true;
        }
      }
  if (!any) {
    R.cx = zero_complex<K>();
    return R;
  }
  std::vector<int> dims;
  for (int t = lo; t <= hi; ++t) dims.push_back(tot.count(t) ? tot[t] : 0);
  auto dimt = [&](int t) { return (t < lo || t > hi) ? 0 : dims[t - lo]; };
  std::map<int, Matrix<K>> d;
  for (int t = lo; t <= hi; ++t) d[t] = Matrix<K>(dimt(t - 1), dimt(t));
  for (int p = 0; p < P; ++p)
    for (int q = 0; q < Q; ++q)
      for (int s = 0; s < int(X.lv[p][q].size()); ++s) {
        auto& c = *X.lv[p][q][s];
        for (int k = c.lo; k <= c.hi(); ++k) {
          if (!c.dim(k)) continue;
          int t = p + q + k, col = R.offset(p, q, s, k);
          if (c.dim(k - 1)) d[t].add_block(R.offset(p, q, s, k - 1), col, c.d(k));
          int hs = order == 12 ? k : q + k;
          int vs = order == 12 ? p + k : k;
          for (int i = 0; i <= p && p >= 1; ++i)
            for (auto& f : X.hface[p][q][s][i]) {
              if (!is_identity_surj(f.eta) || !X.lv[p - 1][q][f.tgt]->dim(k)) continue;
              K sg = ((hs + i) % 2) ? K(-1) : K(1);
              d[t].add_block(R.offset(p - 1, q, f.tgt, k), col, f.map.at(k), sg);
            }
          for (int j = 0; j <= q && q >= 1; ++j)
            for (auto& f : X.vface[p][q][s][j]) {
              if (!is_identity_surj(f.eta) || !X.lv[p][q - 1][f.tgt]->dim(k)) continue;
              K sg = ((vs + j) % 2) ? K(-1) : K(1);
              d[t].add_block(R.offset(p, q - 1, f.tgt, k), col, f.map.at(k), sg);
            }
        }
      }
  R.cx = make_complex<K>(lo, dims, d);
  return R;
}

// x -> (-1)^{pq} x, from order 12 to order 21
template <class K>
ChainMap<K> swap_orders(const NBisimp<K>& X, const BiRealized<K>& R12, const BiRealized<K>& R21) {
  ChainMap<K> r{R12.cx, R21.cx, {}};
  for (int t = R12.cx->lo; t <= R12.cx->hi(); ++t) r.comps[t] = Matrix<K>(R21.cx->dim(t), R12.cx->dim(t));
  for (auto& [key, o] : R12.off) {
    auto [p, q, s, k] = key;
    int dk = X.lv[p][q][s]->dim(k);
    K sg = ((p * q) % 2) ? K(-1) : K(1);
    r.comps[p + q + k].add_block(R21.offset(p, q, s, k), o, Matrix<K>::identity(dk), sg);
  }
  return r;
}

template <class K>
NBisimp<K> transpose(const NBisimp<K>& X) {
  NBisimp<K> T;
  int P = X.hlevels(), Q = X.vlevels();
  T.resize(Q, P);
  for (int q = 0; q < Q; ++q)
    for (int p = 0; p < P; ++p) {
      T.lv[q][p] = X.lv[p][q];
      T.hface[q][p] = X.vface[p][q];
      T.vface[q][p] = X.hface[p][q];
    }
  return T;
}

// Diagonal: nondegenerate summands are (e1, e2, s) with disjoint repeats.
template <class K>
struct Diagonal {
  NSimp<K> X;
  std::vector<std::vector<std::tuple<std::vector<int>, std::vector<int>, int, int, int>>> keys;  // (e1,e2,p,q,s)
  std::map<std::tuple<std::vector<int>, std::vector<int>, int>, int> index;  // per level via e sizes
};

template <class K>
Diagonal<K> diagonal(const NBisimp<K>& X, int maxlevel) {
  Diagonal<K> D;
  int P = X.hlevels(), Q = X.vlevels();
  D.keys.resize(maxlevel + 1);
  for (int n = 0; n <= maxlevel; ++n) {
    for (int p = 0; p <= n && p < P; ++p)
      for (int q = 0; q <= n && q < Q; ++q) {
        if (p + q < n) continue;
        for (auto& e1 : surjections(n, p))
          for (auto& e2 : surjections(n, q)) {
            bool ok = true;
            for (int i = 0; i < n && ok; ++i)
              if (e1[i] == e1[i + 1] && e2[i] == e2[i + 1]) ok = false;
            if (!ok) continue;
            for (int s = 0; s < int(X.lv[p][q].size()); ++s) D.keys[n].emplace_back(e1, e2, p, q, s);
          }
      }
    for (auto& [e1, e2, p, q, s] : D.keys[n]) {
      D.index[{e1, e2, s}] = D.X.add_summand(n, X.lv[p][q][s]);
    }
    if (D.keys[n].empty()) {
      if (int(D.X.lv.size()) <= n) {
        D.X.lv.resize(n + 1);
        D.X.face.resize(n + 1);
      }
    }
  }
  for (int n = 1; n <= maxlevel; ++n)
    for (int id = 0; id < int(D.keys[n].size()); ++id) {
      auto& [e1, e2, p, q, s] = D.keys[n][id];
      BiTerm<K> x{e1, e2, s, identity_map(X.lv[p][q][s])};
      for (int i = 0; i <= n; ++i) {
        BiSum<K> acc;
        for (auto& t : bi_face(X, x, i, false)) accumulate_bi(acc, bi_face(X, t, i, true));
        for (auto& [key, f] : acc) {
          auto& [a1, a2, t] = key;
          // collapse common repeats
          int m = int(a1.size()) - 1;
          std::vector<int> common;
          for (int k = 0; k < m; ++k)
            if (a1[k] == a1[k + 1] && a2[k] == a2[k + 1]) common.push_back(k);
          std::vector<int> rho(m + 1);
          for (int k = 0; k <= m; ++k) {
            int c = 0;
            for (int v : common)
              if (v < k) ++c;
            rho[k] = k - c;
          }
          int r = m - int(common.size());
          std::vector<int> b1(r + 1), b2(r + 1);
          for (int k = 0; k <= m; ++k) {
            b1[rho[k]] = a1[k];
            b2[rho[k]] = a2[k];
          }
          auto it = D.index.find({b1, b2, t});
          if (it == D.index.end()) throw std::logic_error("diagonal face outside enumeration");
          D.X.face[n][id][i].push_back({rho, it->second, f});
        }
      }
    }
  return D;
}

// Alexander-Whitney comparison |diag X| -> Tot_12 X:
// (n, x) -> sum_p (front_p horizontally, back_{n-p} vertically).
template <class K>
ChainMap<K> aw_comparison(const NBisimp<K>& X, const Diagonal<K>& D, const Realized<K>& RD, const BiRealized<K>& R12) {
  ChainMap<K> r{RD.cx, R12.cx, {}};
  for (int t = RD.cx->lo; t <= RD.cx->hi(); ++t) r.comps[t] = Matrix<K>(R12.cx->dim(t), RD.cx->dim(t));
  for (int n = 0; n < int(D.keys.size()); ++n)
    for (int id = 0; id < int(D.keys[n].size()); ++id) {
      auto& [e1, e2, p0, q0, s0] = D.keys[n][id];
      for (int a = 0; a <= n; ++a) {
        std::vector<BiTerm<K>> cur{BiTerm<K>{e1, e2, s0, identity_map(X.lv[p0][q0][s0])}};
        for (int i = n; i > a; --i) {
          std::vector<BiTerm<K>> nx;
          for (auto& t : cur)
            for (auto& u : bi_face(X, t, i, true)) nx.push_back(u);
          cur = std::move(nx);
        }
        for (int i = 0; i < a; ++i) {
          std::vector<BiTerm<K>> nx;
          for (auto& t : cur)
            for (auto& u : bi_face(X, t, 0, false)) nx.push_back(u);
          cur = std::move(nx);
        }
        int b = n - a;
        for (auto& t : cur) {
          if (!is_identity_surj(t.e1) || !is_identity_surj(t.e2)) continue;
          auto& src = X.lv[p0][q0][s0];
          for (int k = src->lo; k <= src->hi(); ++k) {
            if (!src->dim(k) || !X.lv[a][b][t.s]->dim(k)) continue;
            r.comps[n + k].add_block(R12.offset(a, b, t.s, k), RD.offset(n, id, k), t.map.at(k));
          }
        }
      }
    }
  return r;
}

// Free bisimplicial object on S x T: value(a, b) with face maps supplied for
// nondegenerate a (horizontal) and b (vertical).
template <class K>
NBisimp<K> free_bisimp(const SimplicialSet& S, const SimplicialSet& T,
                       const std::function<Cx<K>(int, int, int, int)>& value,
                       const std::function<ChainMap<K>(int, int, int, int, int)>& hmap,
                       const std::function<ChainMap<K>(int, int, int, int, int)>& vmap) {
  int P = S.top() + 1, Q = T.top() + 1;
  NBisimp<K> X;
  X.resize(P, Q);
  std::vector<std::vector<std::map<std::pair<int, int>, int>>> id(P, std::vector<std::map<std::pair<int, int>, int>>(Q));
  for (int p = 0; p < P; ++p)
    for (int q = 0; q < Q; ++q)
      for (int a = 0; a < S.n_nondeg(p); ++a)
        for (int b = 0; b < T.n_nondeg(q); ++b) id[p][q][{a, b}] = X.add_summand(p, q, value(p, a, q, b));
  for (int p = 0; p < P; ++p)
    for (int q = 0; q < Q; ++q)
      for (int a = 0; a < S.n_nondeg(p); ++a)
        for (int b = 0; b < T.n_nondeg(q); ++b) {
          int s = id[p][q][{a, b}];
          for (int i = 0; i <= p && p >= 1; ++i) {
            const auto& f = S.face[p][a][i];
            X.hface[p][q][s][i].push_back({f.eta, id[f.base_dim()][q][{f.base, b}], hmap(p, a, q, b, i)});
          }
          for (int j = 0; j <= q && q >= 1; ++j) {
            const auto& f = T.face[q][b][j];
            X.vface[p][q][s][j].push_back({f.eta, id[p][f.base_dim()][{a, f.base}], vmap(p, a, q, b, j)});
          }
        }
  return X;
}

}  // namespace dsec

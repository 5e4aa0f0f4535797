#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsec/realize.hpp"
#include "dsec/simp.hpp"

namespace dsec {

// Finite category with an explicit composition table.
struct FinCategory {
  std::vector<std::string> obj_names;
  std::vector<int> src, tgt;
  std::vector<std::string> mor_names;
  std::vector<int> ident;              // object -> identity morphism
  std::vector<std::vector<int>> comp;  // comp[g][f] = g∘f, -1 if tgt f != src g
  std::vector<std::vector<std::vector<int>>> homs;

  int nobj() const { return int(obj_names.size()); }
  int nmor() const { return int(src.size()); }
  bool is_identity(int f) const { return ident[src[f]] == f; }

  int compose(int g, int f) const {
    int r = comp[g][f];
    if (r < 0)
      throw std::invalid_argument("morphisms " + mor_names[g] + " and " + mor_names[f] + " are not composable");
    return r;
  }
  // compose a path given in order of application
  int compose_path(const std::vector<int>& fs, int start) const {
    int r = ident[start];
    for (int f : fs) r = compose(f, r);
    return r;
  }
  const std::vector<int>& hom(int a, int b) const { return homs[a][b]; }

  void finalize() {
    homs.assign(nobj(), std::vector<std::vector<int>>(nobj()));
    for (int f = 0; f < nmor(); ++f) homs[src[f]][tgt[f]].push_back(f);
  }
};

using Cat = std::shared_ptr<const FinCategory>;

inline std::vector<std::string> check_category(const FinCategory& c) {
  std::vector<std::string> bad;
  int n = c.nmor();
  if (int(c.ident.size()) != c.nobj()) {
    bad.push_back("identity table has wrong size");
    return bad;
  }
  if (int(c.comp.size()) != n) {
    bad.push_back("composition table has wrong size");
    return bad;
  }
  for (int a = 0; a < c.nobj(); ++a) {
    int e = c.ident[a];
    if (e < 0 || e >= n || c.src[e] != a || c.tgt[e] != a) bad.push_back("identity of " + c.obj_names[a] + " is not an endomorphism of it");
  }
  if (!bad.empty()) return bad;
  for (int g = 0; g < n; ++g)
    for (int f = 0; f < n; ++f) {
      bool composable = c.tgt[f] == c.src[g];
      int gf = c.comp[g][f];
      if (composable && (gf < 0 || gf >= n)) {
        bad.push_back("missing composite " + c.mor_names[g] + "∘" + c.mor_names[f]);
      } else if (!composable && gf >= 0) {
        bad.push_back("composite defined for non-composable " + c.mor_names[g] + "∘" + c.mor_names[f]);
      } else if (composable && (c.src[gf] != c.src[f] || c.tgt[gf] != c.tgt[g])) {
        bad.push_back("composite " + c.mor_names[g] + "∘" + c.mor_names[f] + " has wrong endpoints");
      }
    }
  if (!bad.empty()) return bad;
  for (int f = 0; f < n; ++f) {
    if (c.comp[c.ident[c.tgt[f]]][f] != f) bad.push_back("id∘" + c.mor_names[f] + " != " + c.mor_names[f]);
    if (c.comp[f][c.ident[c.src[f]]] != f) bad.push_back(c.mor_names[f] + "∘id != " + c.mor_names[f]);
  }
  for (int f = 0; f < n; ++f)
    for (int g = 0; g < n; ++g) {
      if (c.tgt[f] != c.src[g]) continue;
      for (int h = 0; h < n; ++h) {
        if (c.tgt[g] != c.src[h]) continue;
        if (c.comp[h][c.comp[g][f]] != c.comp[c.comp[h][g]][f])
          bad.push_back("associativity fails on (" + c.mor_names[h] + "," + c.mor_names[g] + "," + c.mor_names[f] + ")");
      }
    }
  return bad;
}

inline bool same_category(const FinCategory& a, const FinCategory& b) {
  return a.nobj() == b.nobj() && a.src == b.src && a.tgt == b.tgt && a.ident == b.ident && a.comp == b.comp;
}

inline Cat opposite(const FinCategory& c) {
  auto o = std::make_shared<FinCategory>();
  o->obj_names = c.obj_names;
  o->src = c.tgt;
  o->tgt = c.src;
  o->mor_names = c.mor_names;
  o->ident = c.ident;
  o->comp.assign(c.nmor(), std::vector<int>(c.nmor(), -1));
  for (int g = 0; g < c.nmor(); ++g)
    for (int f = 0; f < c.nmor(); ++f)
      if (c.comp[g][f] >= 0) o->comp[f][g] = c.comp[g][f];
  o->finalize();
  return o;
}

// ---------------------------------------------------------------------------
// Builders

// Category from generators listed by endpoints plus an explicit table; used by loaders.
inline Cat make_category(std::vector<std::string> objs, std::vector<std::string> mor_names, std::vector<int> src,
                         std::vector<int> tgt, std::vector<int> ident, std::vector<std::vector<int>> comp) {
  auto c = std::make_shared<FinCategory>();
  c->obj_names = std::move(objs);
  c->mor_names = std::move(mor_names);
  c->src = std::move(src);
  c->tgt = std::move(tgt);
  c->ident = std::move(ident);
  c->comp = std::move(comp);
  c->finalize();
  return c;
}

// Poset on n elements from a relation (closed reflexively and transitively).
inline Cat poset(int n, const std::vector<std::pair<int, int>>& rel, std::vector<std::string> names = {}) {
  std::vector<std::vector<bool>> le(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) le[i][i] = true;
  for (auto [a, b] : rel) {
    if (a < 0 || b < 0 || a >= n || b >= n) throw std::invalid_argument("poset relation out of range");
    le[a][b] = true;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (le[i][k] && le[k][j]) le[i][j] = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && le[i][j] && le[j][i]) throw std::invalid_argument("relation is not antisymmetric");
  if (names.empty())
    for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
  auto c = std::make_shared<FinCategory>();
  c->obj_names = names;
  std::map<std::pair<int, int>, int> id;
  for (int i = 0; i < n; ++i) {
    id[{i, i}] = int(c->src.size());
    c->src.push_back(i);
    c->tgt.push_back(i);
    c->mor_names.push_back("id_" + names[i]);
    c->ident.push_back(i);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && le[i][j]) {
        id[{i, j}] = int(c->src.size());
        c->src.push_back(i);
        c->tgt.push_back(j);
        c->mor_names.push_back(names[i] + "<" + names[j]);
      }
  int m = c->nmor();
  c->comp.assign(m, std::vector<int>(m, -1));
  for (int f = 0; f < m; ++f)
    for (int g = 0; g < m; ++g)
      if (c->tgt[f] == c->src[g]) c->comp[g][f] = id[{c->src[f], c->tgt[g]}];
  c->finalize();
  return c;
}

inline Cat point_category() { return poset(1, {}, {"*"}); }
inline Cat discrete_category(int n) { return poset(n, {}); }
inline Cat ordinal(int n) {  // [n] = {0 < 1 < ... < n}
  std::vector<std::pair<int, int>> r;
  for (int i = 0; i < n; ++i) r.push_back({i, i + 1});
  return poset(n + 1, r);
}

// One-object category from a multiplication table; element 0 is the unit.
inline Cat monoid(const std::vector<std::vector<int>>& mul, std::string name = "*") {
  int n = int(mul.size());
  auto c = std::make_shared<FinCategory>();
  c->obj_names = {name};
  for (int i = 0; i < n; ++i) {
    c->src.push_back(0);
    c->tgt.push_back(0);
    c->mor_names.push_back(i == 0 ? "e" : "m" + std::to_string(i));
  }
  c->ident = {0};
  c->comp.assign(n, std::vector<int>(n, -1));
  for (int g = 0; g < n; ++g)
    for (int f = 0; f < n; ++f) c->comp[g][f] = mul[g][f];
  c->finalize();
  return c;
}

// Free category on a finite DAG (morphisms are paths).
inline Cat free_category(int n, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> paths;  // edge index lists
  std::vector<int> psrc, ptgt;
  for (int i = 0; i < n; ++i) {
    paths.push_back({});
    psrc.push_back(i);
    ptgt.push_back(i);
  }
  // BFS on path length; a cycle would not terminate
  std::vector<std::vector<int>> frontier;
  for (int e = 0; e < int(edges.size()); ++e) frontier.push_back({e});
  int guard = 0;
  while (!frontier.empty()) {
    if (++guard > n + 1) throw std::invalid_argument("free_category needs an acyclic graph");
    std::vector<std::vector<int>> next;
    for (auto& p : frontier) {
      paths.push_back(p);
      psrc.push_back(edges[p.front()].first);
      ptgt.push_back(edges[p.back()].second);
      for (int e = 0; e < int(edges.size()); ++e)
        if (edges[e].first == edges[p.back()].second) {
          auto q = p;
          q.push_back(e);
          next.push_back(q);
        }
    }
    frontier = std::move(next);
  }
  std::map<std::pair<int, std::vector<int>>, int> id;  // (source, path)
  auto c = std::make_shared<FinCategory>();
  for (int i = 0; i < n; ++i) c->obj_names.push_back(std::to_string(i));
  for (int k = 0; k < int(paths.size()); ++k) {
    id[{psrc[k], paths[k]}] = k;
    c->src.push_back(psrc[k]);
    c->tgt.push_back(ptgt[k]);
    std::string nm;
    if (paths[k].empty()) {
      nm = "id_" + std::to_string(psrc[k]);
    } else {
      for (int e : paths[k]) nm += (nm.empty() ? "e" : ".e") + std::to_string(e);
    }
    c->mor_names.push_back(nm);
  }
  for (int i = 0; i < n; ++i) c->ident.push_back(i);
  int m = c->nmor();
  c->comp.assign(m, std::vector<int>(m, -1));
  for (int f = 0; f < m; ++f)
    for (int g = 0; g < m; ++g)
      if (c->tgt[f] == c->src[g]) {
        auto p = paths[f];
        p.insert(p.end(), paths[g].begin(), paths[g].end());
        c->comp[g][f] = id.at({psrc[f], p});
      }
  c->finalize();
  return c;
}

// Skeletal Fin_* on sizes 0..N; morphisms are partial maps (value -1 = undefined).
struct FinStar {
  Cat cat;
  std::vector<std::vector<int>> pmap;  // per morphism
  std::map<std::tuple<int, int, std::vector<int>>, int> index;

  int find(int n, int m, const std::vector<int>& f) const { return index.at({n, m, f}); }
  // preimage of t under morphism f
  std::vector<int> preimage(int f, int t) const {
    std::vector<int> r;
    for (int s = 0; s < int(pmap[f].size()); ++s)
      if (pmap[f][s] == t) r.push_back(s);
    return r;
  }
};

inline FinStar finstar(int N) {
  if (N < 0 || N > 4) throw std::invalid_argument("finstar supports sizes up to 4");
  FinStar F;
  auto c = std::make_shared<FinCategory>();
  for (int n = 0; n <= N; ++n) c->obj_names.push_back(std::to_string(n));
  c->ident.assign(N + 1, -1);
  auto name = [](const std::vector<int>& f) {
    std::string s = "[";
    for (std::size_t i = 0; i < f.size(); ++i) s += (i ? "," : "") + (f[i] < 0 ? std::string("-") : std::to_string(f[i]));
    return s + "]";
  };
  for (int n = 0; n <= N; ++n)
    for (int m = 0; m <= N; ++m) {
      std::vector<int> f(n, -1);
      while (true) {
        int id = int(c->src.size());
        F.index[{n, m, f}] = id;
        F.pmap.push_back(f);
        c->src.push_back(n);
        c->tgt.push_back(m);
        c->mor_names.push_back(std::to_string(n) + "->" + std::to_string(m) + name(f));
        bool ident = n == m;
        for (int i = 0; i < n && ident; ++i) ident = f[i] == i;
        if (ident) c->ident[n] = id;
        int k = n - 1;
        while (k >= 0 && ++f[k] == m) f[k--] = -1;
        if (k < 0) break;
      }
    }
  int M = c->nmor();
  c->comp.assign(M, std::vector<int>(M, -1));
  for (int f = 0; f < M; ++f)
    for (int g = 0; g < M; ++g) {
      if (c->tgt[f] != c->src[g]) continue;
      std::vector<int> h(F.pmap[f].size(), -1);
      for (std::size_t i = 0; i < h.size(); ++i)
        if (F.pmap[f][i] >= 0) h[i] = F.pmap[g][F.pmap[f][i]];
      c->comp[g][f] = F.index.at({c->src[f], c->tgt[g], h});
    }
  c->finalize();
  F.cat = c;
  return F;
}

// Restriction to its domain is a bijection onto the target.
inline bool is_inert(const FinStar& F, int f) {
  int m = F.cat->tgt[f];
  std::vector<int> cnt(m, 0);
  for (int v : F.pmap[f])
    if (v >= 0) ++cnt[v];
  for (int x : cnt)
    if (x != 1) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Functors and natural transformations

struct FinFunctor {
  Cat src, tgt;
  std::vector<int> obj, mor;
};

inline std::vector<std::string> check_functor(const FinFunctor& F) {
  std::vector<std::string> bad;
  const auto& A = *F.src;
  const auto& B = *F.tgt;
  if (int(F.obj.size()) != A.nobj() || int(F.mor.size()) != A.nmor()) {
    bad.push_back("functor tables have wrong size");
    return bad;
  }
  for (int f = 0; f < A.nmor(); ++f) {
    int g = F.mor[f];
    if (g < 0 || g >= B.nmor() || B.src[g] != F.obj[A.src[f]] || B.tgt[g] != F.obj[A.tgt[f]])
      bad.push_back("image of " + A.mor_names[f] + " has wrong endpoints");
  }
  if (!bad.empty()) return bad;
  for (int a = 0; a < A.nobj(); ++a)
    if (F.mor[A.ident[a]] != B.ident[F.obj[a]]) bad.push_back("identity of " + A.obj_names[a] + " not preserved");
  for (int f = 0; f < A.nmor(); ++f)
    for (int g = 0; g < A.nmor(); ++g)
      if (A.comp[g][f] >= 0 && F.mor[A.comp[g][f]] != B.comp[F.mor[g]][F.mor[f]])
        bad.push_back("composite " + A.mor_names[g] + "∘" + A.mor_names[f] + " not preserved");
  return bad;
}

inline FinFunctor identity_functor(const Cat& c) {
  FinFunctor F{c, c, {}, {}};
  F.obj.resize(c->nobj());
  F.mor.resize(c->nmor());
  std::iota(F.obj.begin(), F.obj.end(), 0);
  std::iota(F.mor.begin(), F.mor.end(), 0);
  return F;
}

inline FinFunctor compose(const FinFunctor& G, const FinFunctor& F) {
  FinFunctor H{F.src, G.tgt, {}, {}};
  for (int o : F.obj) H.obj.push_back(G.obj[o]);
  for (int m : F.mor) H.mor.push_back(G.mor[m]);
  return H;
}

inline FinFunctor constant_functor(const Cat& src, const Cat& tgt, int c) {
  FinFunctor F{src, tgt, std::vector<int>(src->nobj(), c), std::vector<int>(src->nmor(), tgt->ident[c])};
  return F;
}

inline bool same_functor(const FinFunctor& F, const FinFunctor& G) { return F.obj == G.obj && F.mor == G.mor; }

struct NatTrans {
  FinFunctor from, to;
  std::vector<int> comp;  // object of source -> morphism from(a) -> to(a)
};

inline std::vector<std::string> check_nat(const NatTrans& t) {
  std::vector<std::string> bad;
  const auto& A = *t.from.src;
  const auto& B = *t.from.tgt;
  for (int a = 0; a < A.nobj(); ++a) {
    int m = t.comp[a];
    if (B.src[m] != t.from.obj[a] || B.tgt[m] != t.to.obj[a]) bad.push_back("component at " + A.obj_names[a] + " has wrong endpoints");
  }
  if (!bad.empty()) return bad;
  for (int f = 0; f < A.nmor(); ++f) {
    int l = B.comp[t.comp[A.tgt[f]]][t.from.mor[f]];
    int r = B.comp[t.to.mor[f]][t.comp[A.src[f]]];
    if (l != r) bad.push_back("naturality square fails at " + A.mor_names[f]);
  }
  return bad;
}

inline NatTrans identity_nat(const FinFunctor& F) {
  NatTrans t{F, F, {}};
  for (int a = 0; a < F.src->nobj(); ++a) t.comp.push_back(F.tgt->ident[F.obj[a]]);
  return t;
}

// whiskering
inline NatTrans whisker_left(const FinFunctor& H, const NatTrans& t) {  // H t
  NatTrans r{compose(H, t.from), compose(H, t.to), {}};
  for (int m : t.comp) r.comp.push_back(H.mor[m]);
  return r;
}
inline NatTrans whisker_right(const NatTrans& t, const FinFunctor& H) {  // t H
  NatTrans r{compose(t.from, H), compose(t.to, H), {}};
  for (int o : H.obj) r.comp.push_back(t.comp[o]);
  return r;
}
inline NatTrans vcompose(const NatTrans& b, const NatTrans& a) {
  NatTrans r{a.from, b.to, {}};
  const auto& B = *a.from.tgt;
  for (std::size_t i = 0; i < a.comp.size(); ++i) r.comp.push_back(B.comp[b.comp[i]][a.comp[i]]);
  return r;
}

// L: C -> D left adjoint to R: D -> C; unit id_C -> RL, counit LR -> id_D.
struct AdjunctionWitness {
  FinFunctor left, right;
  NatTrans unit, counit;
};

inline std::vector<std::string> check_adjunction(const AdjunctionWitness& w) {
  std::vector<std::string> bad;
  for (auto& s : check_functor(w.left)) bad.push_back("left: " + s);
  for (auto& s : check_functor(w.right)) bad.push_back("right: " + s);
  for (auto& s : check_nat(w.unit)) bad.push_back("unit: " + s);
  for (auto& s : check_nat(w.counit)) bad.push_back("counit: " + s);
  if (!bad.empty()) return bad;
  const auto& C = *w.left.src;
  const auto& D = *w.left.tgt;
  // eps_{Lc} ∘ L(eta_c) = id
  for (int c = 0; c < C.nobj(); ++c) {
    int lc = w.left.obj[c];
    int e = w.counit.comp[lc];
    int l = w.left.mor[w.unit.comp[c]];
    if (D.comp[e][l] != D.ident[lc]) bad.push_back("triangle identity fails at " + C.obj_names[c]);
  }
  // R(eps_d) ∘ eta_{Rd} = id
  for (int d = 0; d < D.nobj(); ++d) {
    int rd = w.right.obj[d];
    int r = w.right.mor[w.counit.comp[d]];
    int u = w.unit.comp[rd];
    if (C.comp[r][u] != C.ident[rd]) bad.push_back("triangle identity fails at " + D.obj_names[d]);
  }
  return bad;
}

// ---------------------------------------------------------------------------
// Comma categories

struct CommaCategory {
  Cat cat;
  FinFunctor pr_left, pr_right;
  std::vector<std::tuple<int, int, int>> obj;  // (a, b, alpha)
  std::vector<std::pair<int, int>> mor;        // (u, v)
};

// Objects (a, b, alpha: F a -> G b).
inline CommaCategory comma_category(const FinFunctor& F, const FinFunctor& G) {
  if (F.tgt.get() != G.tgt.get() && !same_category(*F.tgt, *G.tgt))
    throw std::invalid_argument("comma_category: functors have different targets");
  const auto& A = *F.src;
  const auto& B = *G.src;
  const auto& C = *F.tgt;
  CommaCategory R;
  std::map<std::tuple<int, int, int>, int> oid;
  for (int a = 0; a < A.nobj(); ++a)
    for (int b = 0; b < B.nobj(); ++b)
      for (int al : C.hom(F.obj[a], G.obj[b])) {
        oid[{a, b, al}] = int(R.obj.size());
        R.obj.emplace_back(a, b, al);
      }
  auto c = std::make_shared<FinCategory>();
  for (auto& [a, b, al] : R.obj) c->obj_names.push_back("(" + A.obj_names[a] + "," + B.obj_names[b] + "," + C.mor_names[al] + ")");
  c->ident.assign(R.obj.size(), -1);
  std::map<std::tuple<int, int, int, int>, int> mid;  // (src obj, u, v) unique given src
  for (int o = 0; o < int(R.obj.size()); ++o) {
    auto [a, b, al] = R.obj[o];
    for (int a2 = 0; a2 < A.nobj(); ++a2)
      for (int u : A.hom(a, a2))
        for (int b2 = 0; b2 < B.nobj(); ++b2)
          for (int v : B.hom(b, b2)) {
            int lhs = C.comp[G.mor[v]][al];
            for (int al2 : C.hom(F.obj[a2], G.obj[b2])) {
              if (C.comp[al2][F.mor[u]] != lhs) continue;
              int t = oid.at({a2, b2, al2});
              int id = int(R.mor.size());
              R.mor.emplace_back(u, v);
              c->src.push_back(o);
              c->tgt.push_back(t);
              c->mor_names.push_back("(" + A.mor_names[u] + "," + B.mor_names[v] + ")");
              mid[{o, t, u, v}] = id;
              if (u == A.ident[a] && v == B.ident[b] && t == o) c->ident[o] = id;
            }
          }
  }
  int M = int(R.mor.size());
  c->comp.assign(M, std::vector<int>(M, -1));
  for (int f = 0; f < M; ++f)
    for (int g = 0; g < M; ++g) {
      if (c->tgt[f] != c->src[g]) continue;
      int u = A.comp[R.mor[g].first][R.mor[f].first];
      int v = B.comp[R.mor[g].second][R.mor[f].second];
      c->comp[g][f] = mid.at({c->src[f], c->tgt[g], u, v});
    }
  c->finalize();
  R.cat = c;
  R.pr_left = FinFunctor{c, F.src, {}, {}};
  R.pr_right = FinFunctor{c, G.src, {}, {}};
  for (auto& [a, b, al] : R.obj) {
    R.pr_left.obj.push_back(a);
    R.pr_right.obj.push_back(b);
  }
  for (auto& [u, v] : R.mor) {
    R.pr_left.mor.push_back(u);
    R.pr_right.mor.push_back(v);
  }
  return R;
}

// F/c: objects (d, alpha: F d -> c)
inline CommaCategory slice_over(const FinFunctor& F, int c) {
  return comma_category(F, constant_functor(point_category(), F.tgt, c));
}

// c\C: objects (alpha: c -> x)
inline CommaCategory slice_under(const Cat& C, int c) {
  return comma_category(constant_functor(point_category(), C, c), identity_functor(C));
}

// Full subcategory on the listed objects, with inclusion.
struct SubCategory {
  Cat cat;
  FinFunctor incl;
};

inline SubCategory full_subcategory(const Cat& C, const std::vector<int>& objs) {
  std::map<int, int> oid, mid;
  auto c = std::make_shared<FinCategory>();
  for (int o : objs) {
    oid[o] = c->nobj();
    c->obj_names.push_back(C->obj_names[o]);
  }
  std::vector<int> back;
  for (int f = 0; f < C->nmor(); ++f)
    if (oid.count(C->src[f]) && oid.count(C->tgt[f])) {
      mid[f] = int(back.size());
      back.push_back(f);
      c->src.push_back(oid[C->src[f]]);
      c->tgt.push_back(oid[C->tgt[f]]);
      c->mor_names.push_back(C->mor_names[f]);
    }
  for (int o : objs) c->ident.push_back(mid[C->ident[o]]);
  int M = int(back.size());
  c->comp.assign(M, std::vector<int>(M, -1));
  for (int f = 0; f < M; ++f)
    for (int g = 0; g < M; ++g)
      if (c->tgt[f] == c->src[g]) c->comp[g][f] = mid.at(C->comp[back[g]][back[f]]);
  c->finalize();
  SubCategory S{c, FinFunctor{c, C, objs, back}};
  return S;
}

// ---------------------------------------------------------------------------
// Nerve

struct Chain {
  int start = 0;
  std::vector<int> mors;  // identity-free in stored simplices
  bool operator<(const Chain& o) const { return std::tie(start, mors) < std::tie(o.start, o.mors); }
  bool operator==(const Chain& o) const { return start == o.start && mors == o.mors; }
  int length() const { return int(mors.size()); }
};

inline int chain_vertex(const FinCategory& c, const Chain& x, int k) {
  return k == 0 ? x.start : c.tgt[x.mors[k - 1]];
}

// Drop identities; eta maps vertex k of the input to its reduced vertex.
inline std::pair<Chain, std::vector<int>> reduce_chain(const FinCategory& c, const Chain& x) {
  Chain r{x.start, {}};
  std::vector<int> eta{0};
  for (int f : x.mors) {
    if (!c.is_identity(f)) r.mors.push_back(f);
    eta.push_back(r.length());
  }
  return {r, eta};
}

inline bool is_reduced(const FinCategory& c, const Chain& x) {
  for (int f : x.mors)
    if (c.is_identity(f)) return false;
  return true;
}

struct Nerve {
  SimplicialSet set;
  std::vector<std::vector<Chain>> chains;  // per dim
  std::map<Chain, int> index;
};

// All identity-free chains of length <= maxlen, in sorted order per length.
inline std::vector<std::vector<Chain>> reduced_chains(const FinCategory& c, int maxlen) {
  std::vector<std::vector<Chain>> out(maxlen + 1);
  for (int a = 0; a < c.nobj(); ++a) out[0].push_back({a, {}});
  for (int n = 1; n <= maxlen; ++n) {
    for (auto& x : out[n - 1]) {
      int e = n == 1 ? x.start : c.tgt[x.mors.back()];
      for (int f = 0; f < c.nmor(); ++f)
        if (c.src[f] == e && !c.is_identity(f)) {
          Chain y = x;
          y.mors.push_back(f);
          out[n].push_back(y);
        }
    }
    std::sort(out[n].begin(), out[n].end());
  }
  return out;
}

inline Chain chain_face(const FinCategory& c, const Chain& x, int i) {
  int n = x.length();
  Chain y;
  if (i == 0) {
    y.start = n >= 1 ? c.tgt[x.mors[0]] : x.start;
    y.mors.assign(x.mors.begin() + 1, x.mors.end());
  } else if (i == n) {
    y.start = x.start;
    y.mors.assign(x.mors.begin(), x.mors.end() - 1);
  } else {
    y.start = x.start;
    for (int k = 0; k < n; ++k) {
      if (k == i - 1) {
        y.mors.push_back(c.compose(x.mors[i], x.mors[i - 1]));
        ++k;
      } else {
        y.mors.push_back(x.mors[k]);
      }
    }
  }
  return y;
}

inline Nerve nerve(const FinCategory& c, int maxdim) {
  Nerve N;
  N.chains = reduced_chains(c, maxdim + 1);
  bool exact = N.chains[maxdim + 1].empty();
  N.chains.pop_back();
  N.set.maxdim = maxdim;
  N.set.exact = exact;
  for (int n = 0; n <= maxdim; ++n) {
    for (int i = 0; i < int(N.chains[n].size()); ++i) N.index[N.chains[n][i]] = i;
    N.set.count.push_back(int(N.chains[n].size()));
  }
  N.set.face.assign(maxdim + 1, {});
  for (int n = 1; n <= maxdim; ++n)
    for (auto& x : N.chains[n]) {
      std::vector<Simplex> fs;
      for (int i = 0; i <= n; ++i) {
        auto [r, eta] = reduce_chain(c, chain_face(c, x, i));
        fs.push_back({eta, N.index.at(r)});
      }
      N.set.face[n].push_back(fs);
    }
  while (!N.set.count.empty() && N.set.count.back() == 0 && int(N.set.count.size()) > 1) {
    N.set.count.pop_back();
    N.set.face.pop_back();
    N.chains.pop_back();
  }
  return N;
}

inline bool is_direct(const FinCategory& c) {
  for (int f = 0; f < c.nmor(); ++f)
    if (!c.is_identity(f) && c.src[f] == c.tgt[f]) return false;
  // acyclic object graph
  int n = c.nobj();
  std::vector<int> indeg(n, 0);
  std::vector<std::set<int>> adj(n);
  for (int f = 0; f < c.nmor(); ++f)
    if (!c.is_identity(f)) adj[c.src[f]].insert(c.tgt[f]);
  for (int a = 0; a < n; ++a)
    for (int b : adj[a]) ++indeg[b];
  std::vector<int> q;
  for (int a = 0; a < n; ++a)
    if (!indeg[a]) q.push_back(a);
  int seen = 0;
  while (!q.empty()) {
    int a = q.back();
    q.pop_back();
    ++seen;
    for (int b : adj[a])
      if (--indeg[b] == 0) q.push_back(b);
  }
  return seen == n;
}

// longest identity-free chain (direct categories only)
inline int longest_chain(const FinCategory& c) {
  if (!is_direct(c)) throw std::invalid_argument("longest_chain: category is not direct");
  auto ch = reduced_chains(c, c.nobj());
  int L = 0;
  for (int n = 0; n < int(ch.size()); ++n)
    if (!ch[n].empty()) L = n;
  return L;
}

inline bool is_connected(const FinCategory& c) {
  int n = c.nobj();
  if (n == 0) return false;
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::function<int(int)> find = [&](int x) { return p[x] == x ? x : p[x] = find(p[x]); };
  for (int f = 0; f < c.nmor(); ++f) p[find(c.src[f])] = find(c.tgt[f]);
  for (int a = 0; a < n; ++a)
    if (find(a) != find(0)) return false;
  return true;
}

inline bool has_terminal(const FinCategory& c) {
  for (int t = 0; t < c.nobj(); ++t) {
    bool ok = true;
    for (int a = 0; a < c.nobj() && ok; ++a) ok = c.hom(a, t).size() == 1;
    if (ok) return true;
  }
  return false;
}

// Nonempty, connected, and the nerve has the field homology of a point.
template <class K>
bool is_field_acyclic(const FinCategory& c) {
  if (!is_direct(c)) throw std::invalid_argument("is_field_acyclic: category is not direct; nerve truncation would be lossy");
  if (c.nobj() == 0 || !is_connected(c)) return false;
  auto N = nerve(c, std::max(longest_chain(c), 0));
  auto h = homology(*normalized_chains<K>(N.set));
  return h.size() == 1 && h.begin()->first == 0 && h.begin()->second == 1;
}

// ---------------------------------------------------------------------------
// Functor categories by enumeration

inline std::vector<FinFunctor> enumerate_functors(const Cat& I, const Cat& C, std::size_t limit = 100000) {
  std::vector<FinFunctor> out;
  FinFunctor F{I, C, std::vector<int>(I->nobj(), -1), std::vector<int>(I->nmor(), -1)};
  // morphisms in an order where identities are fixed by objects
  std::vector<int> order;
  for (int f = 0; f < I->nmor(); ++f)
    if (!I->is_identity(f)) order.push_back(f);
  std::function<bool(int)> obj_rec, mor_rec;
  auto consistent = [&](int upto) {
    // check composites among assigned morphisms
    for (int a = 0; a <= upto; ++a)
      for (int b = 0; b <= upto; ++b) {
        int f = order[a], g = order[b];
        int gf = I->comp[g][f];
        if (gf < 0 || F.mor[gf] < 0) continue;
        if (C->comp[F.mor[g]][F.mor[f]] != F.mor[gf]) return false;
      }
    return true;
  };
  mor_rec = [&](int k) -> bool {
    if (out.size() >= limit) return false;
    if (k == int(order.size())) {
      if (check_functor(F).empty()) out.push_back(F);
      return true;
    }
    int f = order[k];
    for (int g : C->hom(F.obj[I->src[f]], F.obj[I->tgt[f]])) {
      F.mor[f] = g;
      if (consistent(k)) mor_rec(k + 1);
    }
    F.mor[f] = -1;
    return true;
  };
  obj_rec = [&](int a) -> bool {
    if (a == I->nobj()) {
      for (int b = 0; b < I->nobj(); ++b) F.mor[I->ident[b]] = C->ident[F.obj[b]];
      return mor_rec(0);
    }
    for (int c = 0; c < C->nobj(); ++c) {
      F.obj[a] = c;
      obj_rec(a + 1);
    }
    return true;
  };
  obj_rec(0);
  return out;
}

inline std::vector<NatTrans> enumerate_nats(const FinFunctor& F, const FinFunctor& G) {
  std::vector<NatTrans> out;
  NatTrans t{F, G, std::vector<int>(F.src->nobj(), -1)};
  std::function<void(int)> rec = [&](int a) {
    if (a == F.src->nobj()) {
      if (check_nat(t).empty()) out.push_back(t);
      return;
    }
    for (int m : F.tgt->hom(F.obj[a], G.obj[a])) {
      t.comp[a] = m;
      rec(a + 1);
    }
  };
  rec(0);
  return out;
}

// Fun(I, C) with objects enumerated functors and morphisms natural transformations.
struct FunctorCategory {
  Cat cat;
  std::vector<FinFunctor> objs;
  std::vector<NatTrans> mors;
};

inline FunctorCategory functor_category(const Cat& I, const Cat& C) {
  FunctorCategory R;
  R.objs = enumerate_functors(I, C);
  auto c = std::make_shared<FinCategory>();
  std::map<std::tuple<int, int, std::vector<int>>, int> mid;
  for (int i = 0; i < int(R.objs.size()); ++i) c->obj_names.push_back("F" + std::to_string(i));
  c->ident.assign(R.objs.size(), -1);
  for (int i = 0; i < int(R.objs.size()); ++i)
    for (int j = 0; j < int(R.objs.size()); ++j)
      for (auto& t : enumerate_nats(R.objs[i], R.objs[j])) {
        int id = int(R.mors.size());
        mid[{i, j, t.comp}] = id;
        R.mors.push_back(t);
        c->src.push_back(i);
        c->tgt.push_back(j);
        c->mor_names.push_back("t" + std::to_string(id));
        if (i == j) {
          bool ident = true;
          for (int a = 0; a < I->nobj(); ++a) ident = ident && t.comp[a] == C->ident[R.objs[i].obj[a]];
          if (ident) c->ident[i] = id;
        }
      }
  int M = int(R.mors.size());
  c->comp.assign(M, std::vector<int>(M, -1));
  for (int f = 0; f < M; ++f)
    for (int g = 0; g < M; ++g)
      if (c->tgt[f] == c->src[g]) c->comp[g][f] = mid.at({c->src[f], c->tgt[g], vcompose(R.mors[g], R.mors[f]).comp});
  c->finalize();
  R.cat = c;
  return R;
}

}  // namespace dsec

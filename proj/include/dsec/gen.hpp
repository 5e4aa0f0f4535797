#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dsec/fixtures.hpp"

namespace dsec {

// Seeded source for the property suites. Draws only through integer
// distributions so runs are stable per standard library.
struct Rng {
  std::mt19937_64 g;
  explicit Rng(std::uint64_t seed) : g(seed) {}
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }
  bool coin(int num = 1, int den = 2) { return uniform(0, den - 1) < num; }
};

template <class K>
K random_scalar(Rng& r, bool nonzero = false) {
  int v = nonzero ? r.uniform(1, 6) : r.uniform(0, 6);
  if (r.coin()) v = -v;
  return FieldTraits<K>::from_ratio(v, 1);
}

template <class K>
Matrix<K> random_matrix(Rng& r, int rows, int cols) {
  Matrix<K> m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = random_scalar<K>(r);
  return m;
}

// Unit lower times unit upper triangular: always invertible, inverse exact.
template <class K>
std::pair<Matrix<K>, Matrix<K>> random_invertible(Rng& r, int n) {
  Matrix<K> L = Matrix<K>::identity(n), U = Matrix<K>::identity(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      L(i, j) = random_scalar<K>(r);
      U(j, i) = random_scalar<K>(r);
    }
  // inverses by forward substitution
  auto inv_lower = [n](const Matrix<K>& A) {
    Matrix<K> X = Matrix<K>::identity(n);
    for (int c = 0; c < n; ++c)
      for (int i = 0; i < n; ++i) {
        K s = i == c ? K(1) : K(0);
        for (int k = 0; k < i; ++k) s -= A(i, k) * X(k, c);
        X(i, c) = s;
      }
    return X;
  };
  auto Li = inv_lower(L);
  auto Ui = inv_lower(U.transpose()).transpose();
  return {L * U, Ui * Li};
}

struct ComplexShape {
  int lo = 0;
  std::vector<int> h, b;  // homology rank and rank of d_n : C_n -> C_{n-1}, per degree
  int total() const {
    int t = 0;
    for (std::size_t i = 0; i < h.size(); ++i) t += h[i] + b[i] + (i + 1 < b.size() ? b[i + 1] : 0);
    return t;
  }
};

inline ComplexShape random_shape(Rng& r, int max_total, bool acyclic = false) {
  for (;;) {
    ComplexShape s;
    s.lo = r.uniform(-1, 1);
    int len = r.uniform(1, 4);
    s.h.resize(len);
    s.b.resize(len);
    for (int i = 0; i < len; ++i) {
      s.h[i] = acyclic ? 0 : r.uniform(0, 2);
      s.b[i] = i == 0 ? 0 : r.uniform(0, 2);
    }
    if (s.total() <= max_total) return s;
  }
}

// Standard form (B | H | lift of B_{n-1}) conjugated by random bases.
template <class K>
Cx<K> random_complex(Rng& r, const ComplexShape& s) {
  int len = int(s.h.size());
  std::vector<int> dims(len);
  for (int i = 0; i < len; ++i) dims[i] = s.h[i] + s.b[i] + (i + 1 < len ? s.b[i + 1] : 0);
  std::vector<std::pair<Matrix<K>, Matrix<K>>> P;
  for (int i = 0; i < len; ++i) P.push_back(random_invertible<K>(r, dims[i]));
  std::map<int, Matrix<K>> d;
  for (int i = 1; i < len; ++i) {
    Matrix<K> m(dims[i - 1], dims[i]);
    for (int k = 0; k < s.b[i]; ++k) m(k, dims[i] - s.b[i] + k) = K(1);
    d[s.lo + i] = P[i - 1].first * m * P[i].second;
  }
  return make_complex<K>(s.lo, dims, d);
}

template <class K>
Cx<K> random_complex(Rng& r, int max_total, bool acyclic = false) {
  return random_complex<K>(r, random_shape(r, max_total, acyclic));
}

// A map C -> D: lambda * (inclusion into C ⊕ A) + (dh + hd), in a random basis of D.
// Quasi-iso exactly when lambda != 0 or H(C) = 0.
template <class K>
struct RandomMap {
  ChainMap<K> f;
  bool lambda_zero = false;
};

template <class K>
RandomMap<K> random_map(Rng& r, int max_total) {
  int a_total = r.uniform(0, max_total / 3);
  auto C = random_complex<K>(r, max_total - a_total);
  auto A = random_complex<K>(r, std::max(a_total, 1), true);
  auto S = direct_sum<K>({C, A});
  const auto& D0 = S.cx;
  RandomMap<K> out;
  out.lambda_zero = r.coin(1, 3);
  K lam = out.lambda_zero ? K(0) : random_scalar<K>(r, true);
  auto inc = injection(S, 0);
  ChainMap<K> f{C, D0, {}};
  int lo = std::min(C->lo, D0->lo) - 1, hi = std::max(C->hi(), D0->hi()) + 1;
  std::map<int, Matrix<K>> h;  // C_n -> D_{n+1}
  for (int n = lo; n <= hi; ++n) h[n] = random_matrix<K>(r, D0->dim(n + 1), C->dim(n));
  for (int n = C->lo; n <= C->hi(); ++n) {
    Matrix<K> m = inc.at(n).scaled(lam);
    if (D0->dim(n) && C->dim(n)) {
      if (D0->dim(n + 1)) m = m + D0->d(n + 1) * h[n];
      if (C->dim(n - 1) && D0->dim(n)) m = m + h[n - 1] * C->d(n);
    }
    f.comps[n] = m;
  }
  // change of basis on D
  std::map<int, std::pair<Matrix<K>, Matrix<K>>> Q;
  std::vector<int> dims;
  for (int n = D0->lo; n <= D0->hi(); ++n) {
    Q[n] = random_invertible<K>(r, D0->dim(n));
    dims.push_back(D0->dim(n));
  }
  std::map<int, Matrix<K>> d;
  for (int n = D0->lo + 1; n <= D0->hi(); ++n) d[n] = Q[n - 1].first * D0->d(n) * Q[n].second;
  auto D = make_complex<K>(D0->lo, dims, d);
  ChainMap<K> g{C, D, {}};
  for (int n = C->lo; n <= C->hi(); ++n)
    if (D->dim(n)) g.comps[n] = Q[n].first * f.at(n);
  out.f = g;
  return out;
}

// Random poset on n elements with the last one terminal.
inline Cat random_poset_with_terminal(Rng& r, int n) {
  std::vector<std::pair<int, int>> rel;
  for (int i = 0; i + 1 < n; ++i) {
    rel.push_back({i, n - 1});
    for (int j = i + 1; j + 1 < n; ++j)
      if (r.coin()) rel.push_back({i, j});
  }
  return poset(n, rel);
}

// Strict functor on a poset valued in one complex with scalar gauge maps
// g_j / g_i; every map is an isomorphism.
template <class K>
ChainSection<K> gauge_section(Rng& r, const ChainOpfib<K>& E, const Cx<K>& C) {
  const auto& B = *E.base;
  std::vector<K> g;
  for (int i = 0; i < B.nobj(); ++i) g.push_back(random_scalar<K>(r, true));
  ChainSection<K> S;
  for (int i = 0; i < B.nobj(); ++i) S.obj.push_back({{{1, C}}});
  for (int f = 0; f < B.nmor(); ++f) {
    K s = g[B.tgt[f]] / g[B.src[f]];
    auto id = identity_map(C);
    for (auto& [n, m] : id.comps) m = m.scaled(s);
    S.mor.push_back({S.obj[B.src[f]], S.obj[B.tgt[f]], {id}});
  }
  return S;
}

// Cone on a random ordered simplicial complex (apex 0); contractible.
inline SimplicialSet random_cone(Rng& r, int max_dim) {
  int v = r.uniform(1, 3);
  std::vector<std::vector<int>> faces;  // on vertices 1..v, including vertices
  std::function<void(std::vector<int>, int)> rec = [&](std::vector<int> cur, int next) {
    if (!cur.empty()) faces.push_back(cur);
    if (int(cur.size()) >= max_dim) return;
    for (int x = next; x <= v; ++x) {
      auto c2 = cur;
      c2.push_back(x);
      bool keep = c2.size() <= 1 || r.coin(2, 3);
      if (keep) rec(c2, x + 1);
    }
  };
  rec({}, 1);
  // downward closed by construction (children only from kept parents)
  std::vector<std::vector<int>> all{{0}};
  for (auto& f : faces) {
    all.push_back(f);
    auto g = f;
    g.insert(g.begin(), 0);
    all.push_back(g);
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  });
  // faces of accepted simplices must exist: drop anything whose faces were dropped
  std::set<std::vector<int>> have;
  std::vector<std::vector<int>> ok;
  for (auto& s : all) {
    bool good = true;
    if (s.size() > 1)
      for (std::size_t i = 0; i < s.size() && good; ++i) {
        auto t = s;
        t.erase(t.begin() + i);
        good = have.count(t) > 0;
      }
    if (good) {
      have.insert(s);
      ok.push_back(s);
    }
  }
  int top = 0;
  for (auto& s : ok) top = std::max(top, int(s.size()) - 1);
  SimplicialSet S;
  S.maxdim = top;
  S.exact = true;
  S.count.assign(top + 1, 0);
  std::map<std::vector<int>, int> id;
  for (auto& s : ok) id[s] = S.count[s.size() - 1]++;
  S.face.resize(top + 1);
  for (int p = 1; p <= top; ++p) S.face[p].resize(S.count[p]);
  for (auto& s : ok) {
    int p = int(s.size()) - 1;
    if (p < 1) continue;
    auto& fs = S.face[p][id[s]];
    for (int i = 0; i <= p; ++i) {
      auto t = s;
      t.erase(t.begin() + i);
      fs.push_back(nondeg(p - 1, id.at(t)));
    }
  }
  return S;
}

// C ⊗ N(S) as a free simplicial complex with gauge-twisted identity faces,
// augmented to C; the apex (vertex 0) supplies the splitting.
template <class K>
SplitAugmented<K> random_split_augmented(Rng& r, int max_level, int max_total) {
  auto S = random_cone(r, max_level);
  auto C = random_complex<K>(r, max_total);
  SplitAugmented<K> A;
  A.xm1 = C;
  std::vector<std::vector<K>> g(S.top() + 1);
  std::vector<std::vector<int>> id(S.top() + 1);
  for (int p = 0; p <= S.top(); ++p)
    for (int a = 0; a < S.count[p]; ++a) {
      g[p].push_back(random_scalar<K>(r, true));
      id[p].push_back(A.X.add_summand(p, C));
    }
  auto scaled = [&](const K& s) {
    auto m = identity_map(C);
    for (auto& [n, x] : m.comps) x = x.scaled(s);
    return m;
  };
  for (int p = 1; p <= S.top(); ++p)
    for (int a = 0; a < S.count[p]; ++a)
      for (int i = 0; i <= p; ++i) {
        const auto& f = S.face[p][a][i];
        A.X.face[p][id[p][a]][i].push_back({f.eta, id[f.base_dim()][f.base], scaled(g[f.base_dim()][f.base] / g[p][a])});
      }
  for (int a = 0; a < S.count[0]; ++a) A.eps.push_back(scaled(K(1) / g[0][a]));
  auto S0 = level0_sum(A.X);
  A.eta = ChainMap<K>{C, S0.cx, {}};
  for (int n = C->lo; n <= C->hi(); ++n) {
    Matrix<K> m(S0.cx->dim(n), C->dim(n));
    if (C->dim(n)) m.add_block(sum_off(S0, 0, n), 0, Matrix<K>::identity(C->dim(n)), g[0][0]);
    A.eta.comps[n] = m;
  }
  return A;
}

inline SimplicialSet random_small_set(Rng& r, int max_dim) {
  switch (r.uniform(0, 3)) {
    case 0:
      return standard_simplex(r.uniform(0, max_dim));
    case 1:
      return simplicial_circle();
    case 2:
      return discrete_set(r.uniform(1, 2));
    default:
      return random_cone(r, max_dim);
  }
}

template <class K>
NBisimp<K> random_bisimplicial(Rng& r, int max_level, int max_total) {
  auto S = random_small_set(r, max_level), T = random_small_set(r, max_level);
  auto V = random_complex<K>(r, max_total);
  auto id = [&](int, int, int, int, int) { return identity_map(V); };
  return free_bisimp<K>(S, T, [&](int, int, int, int) { return V; }, id, id);
}

}  // namespace dsec

#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace dsec {

// A possibly degenerate n-simplex s_J(b): eta is a surjection [n] -> [p]
// (stored as its value list, nondecreasing) and b a nondegenerate p-simplex.
struct Simplex {
  std::vector<int> eta;
  int base = 0;

  int dim() const { return int(eta.size()) - 1; }
  int base_dim() const { return eta.empty() ? -1 : eta.back(); }
  bool degenerate() const { return base_dim() != dim(); }
  bool operator==(const Simplex& o) const { return eta == o.eta && base == o.base; }
  bool operator<(const Simplex& o) const { return std::tie(eta, base) < std::tie(o.eta, o.base); }
};

inline std::vector<int> id_surj(int n) {
  std::vector<int> e(n + 1);
  for (int i = 0; i <= n; ++i) e[i] = i;
  return e;
}

inline Simplex nondeg(int n, int id) { return {id_surj(n), id}; }

// Repeat indices of eta, i.e. the normal-form word s_{i_k}...s_{i_1} (descending).
inline std::vector<int> degeneracy_word(const std::vector<int>& eta) {
  std::vector<int> w;
  for (int i = int(eta.size()) - 2; i >= 0; --i)
    if (eta[i] == eta[i + 1]) w.push_back(i);
  return w;
}

inline std::vector<int> surj_from_word(int n, const std::vector<int>& word) {
  // n = dimension after applying the word
  std::vector<int> e(n + 1);
  int v = 0;
  for (int i = 0; i <= n; ++i) {
    if (i > 0 && std::find(word.begin(), word.end(), i - 1) == word.end()) ++v;
    e[i] = v;
  }
  return e;
}

// Truncated simplicial set presented by nondegenerate simplices.
struct SimplicialSet {
  int maxdim = 0;
  bool exact = true;  // no nondegenerate simplices above maxdim
  std::vector<int> count;  // per dimension
  // face[p][id][i] for p >= 1
  std::vector<std::vector<std::vector<Simplex>>> face;

  int top() const {
    for (int p = int(count.size()) - 1; p >= 0; --p)
      if (count[p]) return p;
    return -1;
  }
  int n_nondeg(int p) const { return p < int(count.size()) ? count[p] : 0; }
};

inline void check_dim(const SimplicialSet& s, int n) {
  if (n > s.maxdim && !s.exact)
    throw std::out_of_range("simplicial set truncated at " + std::to_string(s.maxdim) + ", need " + std::to_string(n));
}

inline Simplex face_of(const SimplicialSet& S, const Simplex& x, int i) {
  int n = x.dim();
  if (n < 1 || i < 0 || i > n) throw std::out_of_range("face index out of range");
  std::vector<int> mu;
  for (int k = 0; k < n; ++k) mu.push_back(x.eta[k < i ? k : k + 1]);
  int p = x.base_dim();
  int j = x.eta[i];
  bool hit = (i > 0 && x.eta[i - 1] == j) || (i < n && x.eta[i + 1] == j);
  if (hit) return {mu, x.base};
  // j is no longer hit: push the face into the base simplex
  for (auto& v : mu)
    if (v > j) --v;
  const Simplex& bf = S.face[p][x.base][j];
  std::vector<int> e;
  for (int v : mu) e.push_back(bf.eta[v]);
  return {e, bf.base};
}

inline Simplex degeneracy_of(const Simplex& x, int i) {
  std::vector<int> e;
  for (int k = 0; k <= x.dim() + 1; ++k) e.push_back(x.eta[k <= i ? k : k - 1]);
  return {e, x.base};
}

// Violations of d_i d_j = d_{j-1} d_i (i < j) on nondegenerate simplices.
inline std::vector<std::string> check_simplicial(const SimplicialSet& S) {
  std::vector<std::string> bad;
  for (int p = 1; p < int(S.count.size()); ++p)
    for (int id = 0; id < S.count[p]; ++id) {
      if (int(S.face[p][id].size()) != p + 1) {
        bad.push_back("simplex " + std::to_string(p) + ":" + std::to_string(id) + " has wrong face count");
        continue;
      }
      for (int i = 0; i <= p; ++i) {
        const auto& f = S.face[p][id][i];
        if (f.dim() != p - 1 || f.base < 0 || f.base >= S.n_nondeg(f.base_dim()))
          bad.push_back("simplex " + std::to_string(p) + ":" + std::to_string(id) + " face " + std::to_string(i) +
                        " references a missing simplex");
      }
    }
  if (!bad.empty()) return bad;
  for (int p = 2; p < int(S.count.size()); ++p)
    for (int id = 0; id < S.count[p]; ++id) {
      Simplex x = nondeg(p, id);
      for (int j = 1; j <= p; ++j)
        for (int i = 0; i < j; ++i) {
          auto a = face_of(S, face_of(S, x, j), i);
          auto b = face_of(S, face_of(S, x, i), j - 1);
          if (!(a == b))
            bad.push_back("d" + std::to_string(i) + "d" + std::to_string(j) + " != d" + std::to_string(j - 1) + "d" +
                          std::to_string(i) + " on " + std::to_string(p) + ":" + std::to_string(id));
        }
    }
  return bad;
}

inline SimplicialSet standard_simplex(int n) {
  if (n < 0) throw std::invalid_argument("standard_simplex needs n >= 0");
  SimplicialSet S;
  S.maxdim = n;
  S.count.assign(n + 1, 0);
  S.face.assign(n + 1, {});
  // k-simplices = (k+1)-subsets as bitmasks, ordered lexicographically by vertex list
  std::vector<std::vector<std::vector<int>>> subs(n + 1);
  for (int m = 1; m < (1 << (n + 1)); ++m) {
    std::vector<int> v;
    for (int i = 0; i <= n; ++i)
      if (m >> i & 1) v.push_back(i);
    subs[v.size() - 1].push_back(v);
  }
  std::vector<std::map<std::vector<int>, int>> idx(n + 1);
  for (int k = 0; k <= n; ++k) {
    std::sort(subs[k].begin(), subs[k].end());
    S.count[k] = int(subs[k].size());
    for (int i = 0; i < int(subs[k].size()); ++i) idx[k][subs[k][i]] = i;
  }
  for (int k = 1; k <= n; ++k) {
    S.face[k].resize(subs[k].size());
    for (int id = 0; id < int(subs[k].size()); ++id)
      for (int i = 0; i <= k; ++i) {
        auto v = subs[k][id];
        v.erase(v.begin() + i);
        S.face[k][id].push_back(nondeg(k - 1, idx[k - 1][v]));
      }
  }
  return S;
}

// vertex list of a nondegenerate simplex of the standard simplex
inline std::vector<int> simplex_vertices(int n, int k, int id) {
  std::vector<std::vector<int>> subs;
  for (int m = 1; m < (1 << (n + 1)); ++m) {
    std::vector<int> v;
    for (int i = 0; i <= n; ++i)
      if (m >> i & 1) v.push_back(i);
    if (int(v.size()) == k + 1) subs.push_back(v);
  }
  std::sort(subs.begin(), subs.end());
  return subs.at(id);
}

inline SimplicialSet simplicial_circle() {
  SimplicialSet S;
  S.maxdim = 1;
  S.count = {1, 1};
  S.face = {{}, {{nondeg(0, 0), nondeg(0, 0)}}};
  return S;
}

inline SimplicialSet discrete_set(int points) {
  SimplicialSet S;
  S.maxdim = 0;
  S.count = {points};
  S.face = {{}};
  return S;
}

// Nondegenerate simplices of S x T are pairs (s_J a, s_K b) with J, K disjoint.
struct ProductSet {
  SimplicialSet set;
  std::vector<std::vector<std::pair<Simplex, Simplex>>> pairs;  // per dim
  std::map<std::pair<Simplex, Simplex>, int> index;

  // Normalize a pair of n-simplices into (collapse surjection, nondegenerate id).
  Simplex normalize(const Simplex& x, const Simplex& y) const {
    int n = x.dim();
    std::vector<int> common;
    for (int i = 0; i < n; ++i)
      if (x.eta[i] == x.eta[i + 1] && y.eta[i] == y.eta[i + 1]) common.push_back(i);
    std::vector<int> rho(n + 1);
    for (int k = 0; k <= n; ++k) {
      int c = 0;
      for (int v : common)
        if (v < k) ++c;
      rho[k] = k - c;
    }
    int m = n - int(common.size());
    std::vector<int> ex(m + 1), ey(m + 1);
    for (int k = 0; k <= n; ++k) {
      ex[rho[k]] = x.eta[k];
      ey[rho[k]] = y.eta[k];
    }
    auto it = index.find({Simplex{ex, x.base}, Simplex{ey, y.base}});
    if (it == index.end()) throw std::out_of_range("product simplex beyond truncation");
    return {rho, it->second};
  }
};

inline std::vector<std::vector<int>> surjections(int n, int p) {
  // nondecreasing surjections [n] -> [p]
  std::vector<std::vector<int>> out;
  if (p > n || p < 0) return out;
  std::vector<int> e(n + 1, 0);
  // choose which of the n gaps increase: exactly p of them
  for (int m = 0; m < (1 << n); ++m) {
    if (__builtin_popcount(unsigned(m)) != p) continue;
    int v = 0;
    e[0] = 0;
    for (int i = 1; i <= n; ++i) {
      if (m >> (i - 1) & 1) ++v;
      e[i] = v;
    }
    out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline ProductSet product(const SimplicialSet& S, const SimplicialSet& T, int maxdim = -1) {
  bool exact = S.exact && T.exact;
  int full = std::max(S.top(), 0) + std::max(T.top(), 0);
  if (maxdim < 0) {
    if (!exact) throw std::invalid_argument("product of truncated sets needs an explicit maxdim");
    maxdim = full;
  }
  if (maxdim > S.maxdim && !S.exact) throw std::out_of_range("left factor truncated below requested dimension");
  if (maxdim > T.maxdim && !T.exact) throw std::out_of_range("right factor truncated below requested dimension");
  ProductSet P;
  P.set.maxdim = maxdim;
  P.set.exact = exact && maxdim >= full;
  P.pairs.resize(maxdim + 1);
  P.set.count.assign(maxdim + 1, 0);
  P.set.face.assign(maxdim + 1, {});
  for (int n = 0; n <= maxdim; ++n) {
    for (int p = 0; p <= n; ++p)
      for (int q = 0; q <= n; ++q) {
        if (p + q < n) continue;
        auto sp = surjections(n, p), sq = surjections(n, q);
        for (int a = 0; a < S.n_nondeg(p); ++a)
          for (int b = 0; b < T.n_nondeg(q); ++b)
            for (auto& e1 : sp)
              for (auto& e2 : sq) {
                bool ok = true;
                for (int i = 0; i < n && ok; ++i)
                  if (e1[i] == e1[i + 1] && e2[i] == e2[i + 1]) ok = false;
                if (ok) P.pairs[n].push_back({Simplex{e1, a}, Simplex{e2, b}});
              }
      }
    std::sort(P.pairs[n].begin(), P.pairs[n].end());
    for (int i = 0; i < int(P.pairs[n].size()); ++i) P.index[P.pairs[n][i]] = i;
    P.set.count[n] = int(P.pairs[n].size());
  }
  for (int n = 1; n <= maxdim; ++n) {
    P.set.face[n].resize(P.pairs[n].size());
    for (int id = 0; id < int(P.pairs[n].size()); ++id)
      for (int i = 0; i <= n; ++i) {
        auto& [x, y] = P.pairs[n][id];
        P.set.face[n][id].push_back(P.normalize(face_of(S, x, i), face_of(T, y, i)));
      }
  }
  return P;
}

// Map sending each nondegenerate simplex to a simplex of the target.
struct SimplicialMap {
  const SimplicialSet* src = nullptr;
  const SimplicialSet* tgt = nullptr;
  std::vector<std::vector<Simplex>> img;  // img[p][id]

  Simplex apply(const Simplex& x) const {
    const Simplex& y = img[x.base_dim()][x.base];
    std::vector<int> e;
    for (int v : x.eta) e.push_back(y.eta[v]);
    return {e, y.base};
  }
};

inline std::vector<std::string> check_simplicial_map(const SimplicialMap& f) {
  std::vector<std::string> bad;
  for (int p = 1; p < int(f.src->count.size()); ++p)
    for (int id = 0; id < f.src->count[p]; ++id)
      for (int i = 0; i <= p; ++i) {
        auto a = f.apply(face_of(*f.src, nondeg(p, id), i));
        auto b = face_of(*f.tgt, f.img[p][id], i);
        if (!(a == b))
          bad.push_back("map does not commute with d" + std::to_string(i) + " on " + std::to_string(p) + ":" +
                        std::to_string(id));
      }
  return bad;
}

}  // namespace dsec

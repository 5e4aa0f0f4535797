#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dsec/matrix.hpp"

namespace dsec {

// Bounded chain complex. d(n): C_n -> C_{n-1}.
template <class K>
struct ChainComplex {
  int lo = 0;
  std::vector<int> dims;          // dims[i] = dim C_{lo+i}
  std::vector<Matrix<K>> diffs;   // diffs[i] = d_{lo+i}

  int hi() const { return lo + int(dims.size()) - 1; }
  int dim(int n) const { return (n < lo || n > hi()) ? 0 : dims[n - lo]; }
  int total_dim() const {
    int s = 0;
    for (int x : dims) s += x;
    return s;
  }
  Matrix<K> d(int n) const {
    if (n < lo || n > hi()) return Matrix<K>(dim(n - 1), dim(n));
    return diffs[n - lo];
  }
  // offset of degree n inside the degree-ordered flat basis
  int flat_offset(int n) const {
    int s = 0;
    for (int k = lo; k < n && k <= hi(); ++k) s += dim(k);
    return s;
  }
};

template <class K>
using Cx = std::shared_ptr<const ChainComplex<K>>;

// Build from dims and differentials; missing differentials are zero.
template <class K>
Cx<K> make_complex(int lo, std::vector<int> dims, const std::map<int, Matrix<K>>& d = {}) {
  // trim zero ends so equal complexes have equal shapes
  while (!dims.empty() && dims.back() == 0) dims.pop_back();
  int skip = 0;
  while (skip < int(dims.size()) && dims[skip] == 0) ++skip;
  auto c = std::make_shared<ChainComplex<K>>();
  if (skip == int(dims.size())) {
    c->lo = 0;
    for (auto& [n, m] : d)
      if (!m.is_zero()) throw std::invalid_argument("nonzero differential on zero complex");
    return c;
  }
  c->lo = lo + skip;
  c->dims.assign(dims.begin() + skip, dims.end());
  for (int n = c->lo; n <= c->hi(); ++n) {
    auto it = d.find(n);
    if (it == d.end()) {
      c->diffs.emplace_back(c->dim(n - 1), c->dim(n));
    } else {
      if (it->second.rows() != c->dim(n - 1) || it->second.cols() != c->dim(n))
        throw std::invalid_argument("differential shape mismatch at degree " + std::to_string(n));
      c->diffs.push_back(it->second);
    }
  }
  for (auto& [n, m] : d)
    if ((n < c->lo || n > c->hi()) && !m.is_zero())
      throw std::invalid_argument("differential outside support at degree " + std::to_string(n));
  return c;
}

template <class K>
Cx<K> zero_complex() {
  return make_complex<K>(0, {});
}

// k in degree n
template <class K>
Cx<K> unit_complex(int n = 0) {
  return make_complex<K>(n, {1});
}

// Throws with "d∘d ≠ 0 at degree n" on failure.
template <class K>
void validate(const ChainComplex<K>& c) {
  for (int n = c.lo; n <= c.hi(); ++n) {
    auto dn = c.d(n);
    if (dn.rows() != c.dim(n - 1) || dn.cols() != c.dim(n))
      throw std::invalid_argument("differential shape mismatch at degree " + std::to_string(n));
  }
  for (int n = c.lo + 1; n <= c.hi(); ++n)
    if (!(c.d(n - 1) * c.d(n)).is_zero())
      throw std::invalid_argument("d∘d ≠ 0 at degree " + std::to_string(n));
}

template <class K>
bool same_complex(const Cx<K>& a, const Cx<K>& b) {
  if (a == b) return true;
  if (a->total_dim() == 0 && b->total_dim() == 0) return true;
  if (a->lo != b->lo || a->dims != b->dims) return false;
  for (int n = a->lo; n <= a->hi(); ++n)
    if (a->d(n) != b->d(n)) return false;
  return true;
}

// degree -> rank of H_n (zeros omitted)
template <class K>
std::map<int, int> homology(const ChainComplex<K>& c) {
  std::map<int, int> h;
  std::map<int, int> rk;
  for (int n = c.lo; n <= c.hi() + 1; ++n) rk[n] = rank(c.d(n));
  for (int n = c.lo; n <= c.hi(); ++n) {
    int r = c.dim(n) - rk[n] - rk[n + 1];
    if (r) h[n] = r;
  }
  return h;
}

template <class K>
bool is_acyclic(const ChainComplex<K>& c) {
  int prev = 0;  // rank of d_n for current n
  for (int n = c.lo; n <= c.hi(); ++n) {
    int next = rank(c.d(n + 1));
    if (n == c.lo) prev = rank(c.d(n));
    if (c.dim(n) != prev + next) return false;
    prev = next;
  }
  return true;
}

template <class K>
std::string homology_str(const ChainComplex<K>& c) {
  auto h = homology(c);
  if (h.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto [n, r] : h) {
    if (!first) os << ",";
    first = false;
    os << "H" << n << "=" << r;
  }
  return os.str();
}

template <class K>
struct ChainMap {
  Cx<K> src, tgt;
  std::map<int, Matrix<K>> comps;

  Matrix<K> at(int n) const {
    auto it = comps.find(n);
    if (it != comps.end()) return it->second;
    return Matrix<K>(tgt->dim(n), src->dim(n));
  }
  void set(int n, Matrix<K> m) {
    if (m.rows() != tgt->dim(n) || m.cols() != src->dim(n))
      throw std::invalid_argument("chain map component shape mismatch at degree " + std::to_string(n));
    comps[n] = std::move(m);
  }
  void add(int n, const Matrix<K>& m, const K& s = K(1)) {
    auto cur = at(n);
    cur.add_block(0, 0, m, s);
    comps[n] = std::move(cur);
  }
};

template <class K>
int deg_lo(const ChainMap<K>& f) {
  return std::min(f.src->lo, f.tgt->lo);
}
template <class K>
int deg_hi(const ChainMap<K>& f) {
  return std::max(f.src->hi(), f.tgt->hi());
}

template <class K>
ChainMap<K> zero_map(Cx<K> a, Cx<K> b) {
  return ChainMap<K>{std::move(a), std::move(b), {}};
}

template <class K>
ChainMap<K> identity_map(Cx<K> a) {
  ChainMap<K> f{a, a, {}};
  for (int n = a->lo; n <= a->hi(); ++n) f.comps[n] = Matrix<K>::identity(a->dim(n));
  return f;
}

// Returns g∘f.
template <class K>
ChainMap<K> compose(const ChainMap<K>& g, const ChainMap<K>& f) {
  if (!same_complex(f.tgt, g.src)) throw std::invalid_argument("compose: target/source mismatch");
  ChainMap<K> h{f.src, g.tgt, {}};
  for (int n = f.src->lo; n <= f.src->hi(); ++n) {
    if (g.tgt->dim(n) == 0) continue;
    h.comps[n] = g.at(n) * f.at(n);
  }
  return h;
}

template <class K>
ChainMap<K> add_maps(const ChainMap<K>& f, const ChainMap<K>& g, const K& s = K(1)) {
  if (!same_complex(f.src, g.src) || !same_complex(f.tgt, g.tgt)) throw std::invalid_argument("add: shape mismatch");
  ChainMap<K> h = f;
  for (auto& [n, m] : g.comps) h.add(n, m, s);
  return h;
}

template <class K>
bool maps_equal(const ChainMap<K>& f, const ChainMap<K>& g) {
  if (!same_complex(f.src, g.src) || !same_complex(f.tgt, g.tgt)) return false;
  for (int n = f.src->lo; n <= f.src->hi(); ++n)
    if (f.at(n) != g.at(n)) return false;
  return true;
}

template <class K>
bool is_chain_map(const ChainMap<K>& f) {
  for (int n = deg_lo(f); n <= deg_hi(f); ++n) {
    auto fn = f.at(n);
    if (fn.rows() != f.tgt->dim(n) || fn.cols() != f.src->dim(n)) return false;
    if (f.tgt->d(n) * fn != f.at(n - 1) * f.src->d(n)) return false;
  }
  return true;
}

// Cone(f)_n = A_{n-1} + B_n, d(a,b) = (-da, fa + db)
template <class K>
Cx<K> cone(const ChainMap<K>& f) {
  const auto& A = *f.src;
  const auto& B = *f.tgt;
  int lo = std::min(A.lo + 1, B.lo), hi = std::max(A.hi() + 1, B.hi());
  std::vector<int> dims;
  std::map<int, Matrix<K>> d;
  for (int n = lo; n <= hi; ++n) dims.push_back(A.dim(n - 1) + B.dim(n));
  for (int n = lo; n <= hi; ++n) {
    int a1 = A.dim(n - 1), b0 = B.dim(n), a2 = A.dim(n - 2), b1 = B.dim(n - 1);
    Matrix<K> m(a2 + b1, a1 + b0);
    m.add_block(0, 0, A.d(n - 1), K(-1));
    m.add_block(a2, 0, f.at(n - 1));
    m.add_block(a2, a1, B.d(n));
    d[n] = m;
  }
  return make_complex<K>(lo, dims, d);
}

template <class K>
bool is_quasi_iso(const ChainMap<K>& f) {
  return is_acyclic(*cone(f));
}

// ---------------------------------------------------------------------------
// Direct sums

template <class K>
struct SumCx {
  Cx<K> cx;
  std::vector<std::map<int, int>> off;  // off[s][n]: row offset of summand s in degree n
  std::vector<Cx<K>> parts;
};

template <class K>
SumCx<K> direct_sum(const std::vector<Cx<K>>& parts) {
  SumCx<K> r;
  r.parts = parts;
  if (parts.empty()) {
    r.cx = zero_complex<K>();
    return r;
  }
  int lo = 0, hi = -1;
  bool any = false;
  for (auto& p : parts)
    if (p->total_dim()) {
      lo = any ? std::min(lo, p->lo) : p->lo;
      hi = any ? std::max(hi, p->hi()) : p->hi();
      any = true;
    }
  std::vector<int> dims;
  for (int n = lo; n <= hi; ++n) {
    int s = 0;
    for (auto& p : parts) s += p->dim(n);
    dims.push_back(s);
  }
  r.off.assign(parts.size(), {});
  for (int n = lo; n <= hi; ++n) {
    int s = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      r.off[i][n] = s;
      s += parts[i]->dim(n);
    }
  }
  std::map<int, Matrix<K>> d;
  for (int n = lo; n <= hi; ++n) {
    Matrix<K> m(n - 1 >= lo ? dims[n - 1 - lo] : 0, dims[n - lo]);
    if (m.rows())
      for (std::size_t i = 0; i < parts.size(); ++i) m.add_block(r.off[i][n - 1], r.off[i][n], parts[i]->d(n));
    d[n] = m;
  }
  r.cx = make_complex<K>(lo, dims, d);
  return r;
}

template <class K>
int sum_off(const SumCx<K>& s, int part, int n) {
  auto it = s.off[part].find(n);
  return it == s.off[part].end() ? 0 : it->second;
}

template <class K>
ChainMap<K> injection(const SumCx<K>& s, int part) {
  ChainMap<K> f{s.parts[part], s.cx, {}};
  auto& p = *s.parts[part];
  for (int n = p.lo; n <= p.hi(); ++n) {
    Matrix<K> m(s.cx->dim(n), p.dim(n));
    m.add_block(sum_off(s, part, n), 0, Matrix<K>::identity(p.dim(n)));
    f.comps[n] = m;
  }
  return f;
}

template <class K>
ChainMap<K> projection(const SumCx<K>& s, int part) {
  ChainMap<K> f{s.cx, s.parts[part], {}};
  auto& p = *s.parts[part];
  for (int n = p.lo; n <= p.hi(); ++n) {
    Matrix<K> m(p.dim(n), s.cx->dim(n));
    m.add_block(0, sum_off(s, part, n), Matrix<K>::identity(p.dim(n)));
    f.comps[n] = m;
  }
  return f;
}

// Block map between sums: blocks[(i,j)] : src part j -> tgt part i.
template <class K>
ChainMap<K> block_map(const SumCx<K>& src, const SumCx<K>& tgt,
                      const std::vector<std::tuple<int, int, ChainMap<K>>>& blocks) {
  ChainMap<K> f{src.cx, tgt.cx, {}};
  for (int n = src.cx->lo; n <= src.cx->hi(); ++n) {
    if (!tgt.cx->dim(n)) continue;
    Matrix<K> m(tgt.cx->dim(n), src.cx->dim(n));
    for (auto& [i, j, b] : blocks) {
      if (!src.parts[j]->dim(n) || !tgt.parts[i]->dim(n)) continue;
      m.add_block(sum_off(tgt, i, n), sum_off(src, j, n), b.at(n));
    }
    f.comps[n] = m;
  }
  return f;
}

template <class K>
ChainMap<K> sum_maps(const std::vector<ChainMap<K>>& fs) {
  std::vector<Cx<K>> a, b;
  for (auto& f : fs) {
    a.push_back(f.src);
    b.push_back(f.tgt);
  }
  auto sa = direct_sum(a), sb = direct_sum(b);
  std::vector<std::tuple<int, int, ChainMap<K>>> bl;
  for (std::size_t i = 0; i < fs.size(); ++i) bl.emplace_back(int(i), int(i), fs[i]);
  return block_map(sa, sb, bl);
}

// C[k]: (C[k])_n = C_{n-k}, differential unchanged
template <class K>
Cx<K> shift(const Cx<K>& c, int k) {
  std::map<int, Matrix<K>> d;
  for (int n = c->lo; n <= c->hi(); ++n) d[n + k] = c->d(n);
  return make_complex<K>(c->lo + k, c->dims, d);
}

// ---------------------------------------------------------------------------
// Flat multi-tensor over words of keyed atoms

// Degree-ordered flat basis of a complex.
template <class K>
struct FlatBasis {
  std::vector<int> deg, idx;
  explicit FlatBasis(const ChainComplex<K>& c) {
    for (int n = c.lo; n <= c.hi(); ++n)
      for (int i = 0; i < c.dim(n); ++i) {
        deg.push_back(n);
        idx.push_back(i);
      }
  }
};

template <class K>
struct Atom {
  std::int64_t key;
  Cx<K> cx;
  bool operator==(const Atom& o) const { return key == o.key && cx == o.cx; }
};

template <class K>
using Word = std::vector<Atom<K>>;

template <class K>
struct WordCx {
  Word<K> word;
  Cx<K> cx;
  std::vector<FlatBasis<K>> fb;                  // per atom
  std::vector<std::vector<std::vector<int>>> tup;  // tup[n - lo][i] = tuple
  std::map<std::vector<int>, std::pair<int, int>> index;  // tuple -> (deg, idx)

  int tuple_deg(const std::vector<int>& t) const {
    int s = 0;
    for (std::size_t a = 0; a < t.size(); ++a) s += fb[a].deg[t[a]];
    return s;
  }
};

template <class K>
std::shared_ptr<const WordCx<K>> build_word_cx(const Word<K>& w) {
  auto r = std::make_shared<WordCx<K>>();
  r->word = w;
  for (auto& a : w) r->fb.emplace_back(*a.cx);
  // enumerate tuples lexicographically
  std::vector<std::vector<int>> all;
  std::vector<int> cur(w.size(), 0);
  bool empty = false;
  for (auto& f : r->fb)
    if (f.deg.empty()) empty = true;
  if (!empty) {
    while (true) {
      all.push_back(cur);
      int k = int(w.size()) - 1;
      while (k >= 0 && ++cur[k] == int(r->fb[k].deg.size())) cur[k--] = 0;
      if (k < 0) break;
    }
  }
  std::map<int, std::vector<std::vector<int>>> by;
  for (auto& t : all) by[r->tuple_deg(t)].push_back(t);
  int lo = by.empty() ? 0 : by.begin()->first;
  int hi = by.empty() ? -1 : by.rbegin()->first;
  std::vector<int> dims;
  for (int n = lo; n <= hi; ++n) {
    auto& v = by[n];
    for (int i = 0; i < int(v.size()); ++i) r->index[v[i]] = {n, i};
    dims.push_back(int(v.size()));
    r->tup.push_back(v);
  }
  std::map<int, Matrix<K>> d;
  for (int n = lo; n <= hi; ++n) {
    Matrix<K> m(n - 1 >= lo ? dims[n - 1 - lo] : 0, dims[n - lo]);
    if (m.rows()) {
      for (int col = 0; col < dims[n - lo]; ++col) {
        const auto& t = r->tup[n - lo][col];
        int sdeg = 0;
        for (std::size_t a = 0; a < w.size(); ++a) {
          const auto& f = r->fb[a];
          int dg = f.deg[t[a]], ix = f.idx[t[a]];
          K sign = (sdeg % 2) ? K(-1) : K(1);
          auto da = w[a].cx->d(dg);
          int base = w[a].cx->flat_offset(dg - 1);
          for (int row = 0; row < da.rows(); ++row) {
            const K& v = da(row, ix);
            if (v == K(0)) continue;
            auto t2 = t;
            t2[a] = base + row;
            m(r->index.at(t2).second, col) += sign * v;
          }
          sdeg += dg;
        }
      }
    }
    d[n] = m;
  }
  // make_complex trims nothing here since every listed degree is nonempty
  auto c = std::make_shared<ChainComplex<K>>();
  if (!dims.empty()) {
    c->lo = lo;
    c->dims = dims;
    for (int n = lo; n <= hi; ++n) c->diffs.push_back(d[n]);
  }
  r->cx = c;
  return r;
}

template <class K>
std::shared_ptr<const WordCx<K>> word_cx(const Word<K>& w) {
  using Key = std::vector<std::pair<std::int64_t, const void*>>;
  static std::map<Key, std::shared_ptr<const WordCx<K>>> cache;
  // a single atom is its own complex; keep the pointer
  Key k;
  for (auto& a : w) k.emplace_back(a.key, a.cx.get());
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  auto r = build_word_cx(w);
  if (w.size() == 1) {
    auto rr = std::make_shared<WordCx<K>>(*r);
    rr->cx = w[0].cx;
    r = rr;
  }
  cache[k] = r;
  return r;
}

template <class K>
Cx<K> tensor(const Cx<K>& a, const Cx<K>& b) {
  return word_cx<K>({{0, a}, {1, b}})->cx;
}

template <class K>
Cx<K> tensor_all(const std::vector<Cx<K>>& cs) {
  Word<K> w;
  for (std::size_t i = 0; i < cs.size(); ++i) w.push_back({std::int64_t(i), cs[i]});
  return word_cx(w)->cx;
}

// Tensor of degree-0 maps; the source word is the concatenation of the
// source words of the factors, likewise for targets.
template <class K>
ChainMap<K> tensor_maps(const std::vector<std::shared_ptr<const WordCx<K>>>& srcs,
                        const std::vector<std::shared_ptr<const WordCx<K>>>& tgts,
                        const std::vector<ChainMap<K>>& fs) {
  Word<K> sw, tw;
  for (auto& s : srcs) sw.insert(sw.end(), s->word.begin(), s->word.end());
  for (auto& t : tgts) tw.insert(tw.end(), t->word.begin(), t->word.end());
  auto S = word_cx(sw), T = word_cx(tw);
  ChainMap<K> r{S->cx, T->cx, {}};
  for (int n = S->cx->lo; n <= S->cx->hi(); ++n) {
    Matrix<K> m(T->cx->dim(n), S->cx->dim(n));
    const auto& row = S->tup[n - S->cx->lo];
    for (int col = 0; col < int(row.size()); ++col) {
      const auto& t = row[col];
      // expand factor by factor
      std::vector<std::pair<std::vector<int>, K>> acc{{{}, K(1)}};
      std::size_t pos = 0;
      for (std::size_t f = 0; f < fs.size() && !acc.empty(); ++f) {
        std::size_t len = srcs[f]->word.size();
        std::vector<int> seg(t.begin() + pos, t.begin() + pos + len);
        pos += len;
        auto [dg, ix] = srcs[f]->index.at(seg);
        auto mf = fs[f].at(dg);
        std::vector<std::pair<std::vector<int>, K>> nxt;
        const auto& trow = tgts[f]->tup;
        int tlo = tgts[f]->cx->lo;
        for (int i = 0; i < mf.rows(); ++i) {
          const K& v = mf(i, ix);
          if (v == K(0)) continue;
          const auto& tt = trow[dg - tlo][i];
          for (auto& [pre, c] : acc) {
            auto p2 = pre;
            p2.insert(p2.end(), tt.begin(), tt.end());
            nxt.emplace_back(std::move(p2), c * v);
          }
        }
        acc = std::move(nxt);
      }
      for (auto& [tt, c] : acc) m(T->index.at(tt).second, col) += c;
    }
    r.comps[n] = m;
  }
  return r;
}

template <class K>
ChainMap<K> tensor_map2(const ChainMap<K>& f, const ChainMap<K>& g) {
  auto a = word_cx<K>({{0, f.src}}), b = word_cx<K>({{1, g.src}});
  auto c = word_cx<K>({{0, f.tgt}}), d = word_cx<K>({{1, g.tgt}});
  return tensor_maps<K>({a, b}, {c, d}, {f, g});
}

// Koszul-signed iso word -> word' where word'[k] = word[perm[k]].
template <class K>
ChainMap<K> permute_word(const Word<K>& w, const std::vector<int>& perm) {
  Word<K> w2;
  for (int p : perm) w2.push_back(w[p]);
  auto S = word_cx(w), T = word_cx(w2);
  ChainMap<K> r{S->cx, T->cx, {}};
  for (int n = S->cx->lo; n <= S->cx->hi(); ++n) {
    Matrix<K> m(T->cx->dim(n), S->cx->dim(n));
    const auto& row = S->tup[n - S->cx->lo];
    for (int col = 0; col < int(row.size()); ++col) {
      const auto& t = row[col];
      std::vector<int> t2;
      for (int p : perm) t2.push_back(t[p]);
      int sgn = 0;
      for (std::size_t k = 0; k < perm.size(); ++k)
        for (std::size_t l = k + 1; l < perm.size(); ++l)
          if (perm[k] > perm[l]) sgn += (S->fb[perm[k]].deg[t[perm[k]]] & 1) * (S->fb[perm[l]].deg[t[perm[l]]] & 1);
      m(T->index.at(t2).second, col) = (sgn & 1) ? K(-1) : K(1);
    }
    r.comps[n] = m;
  }
  return r;
}

// Stable sort by key; returns perm with sorted[k] = w[perm[k]].
template <class K>
std::vector<int> sort_perm(const Word<K>& w) {
  std::vector<int> p(w.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = int(i);
  std::stable_sort(p.begin(), p.end(), [&](int a, int b) { return w[a].key < w[b].key; });
  return p;
}

template <class K>
Word<K> sorted_word(const Word<K>& w) {
  Word<K> r;
  for (int p : sort_perm(w)) r.push_back(w[p]);
  return r;
}

}  // namespace dsec

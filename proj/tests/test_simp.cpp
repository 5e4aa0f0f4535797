#include <gtest/gtest.h>

#include "dsec/gen.hpp"
#include "dsec/simp.hpp"

using namespace dsec;

namespace {

// chains of length n+1 in the grid poset [p] x [q]: the nondegenerate
// n-simplices of the product of two standard simplices
int grid_chains(int p, int q, int n) {
  std::vector<std::pair<int, int>> pts;
  for (int a = 0; a <= p; ++a)
    for (int b = 0; b <= q; ++b) pts.push_back({a, b});
  std::function<int(std::pair<int, int>, int)> go = [&](std::pair<int, int> at, int left) {
    if (left == 0) return 1;
    int s = 0;
    for (auto& x : pts)
      if (x != at && x.first >= at.first && x.second >= at.second) s += go(x, left - 1);
    return s;
  };
  int total = 0;
  for (auto& x : pts) total += go(x, n);
  return total;
}

int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(Simp, StandardSimplexCounts) {
  auto d2 = standard_simplex(2);
  EXPECT_EQ(d2.n_nondeg(0), 3);
  EXPECT_EQ(d2.n_nondeg(1), 3);
  EXPECT_EQ(d2.n_nondeg(2), 1);
  EXPECT_TRUE(check_simplicial(d2).empty());
  for (int n = 0; n <= 4; ++n) {
    auto s = standard_simplex(n);
    for (int k = 0; k <= n + 1; ++k) EXPECT_EQ(s.n_nondeg(k), binom(n + 1, k + 1));
  }
  EXPECT_THROW(standard_simplex(-1), std::invalid_argument);
}

TEST(Simp, FaceOfEdgeInTriangle) {
  auto d2 = standard_simplex(2);
  // [0,2] is the edge opposite vertex 1
  auto f = face_of(d2, nondeg(2, 0), 1);
  EXPECT_EQ(simplex_vertices(2, 1, f.base), (std::vector<int>{0, 2}));
}

TEST(Simp, DegenerateFacesCollapse) {
  auto d1 = standard_simplex(1);
  auto x = degeneracy_of(nondeg(1, 0), 0);  // s0 of the edge
  ASSERT_EQ(x.dim(), 2);
  // d0 s0 = d1 s0 = id
  EXPECT_EQ(face_of(d1, x, 0), nondeg(1, 0));
  EXPECT_EQ(face_of(d1, x, 1), nondeg(1, 0));
  EXPECT_EQ(face_of(d1, x, 2).base_dim(), 0);
}

TEST(Simp, SquareProduct) {
  auto P = product(standard_simplex(1), standard_simplex(1));
  EXPECT_EQ(P.set.n_nondeg(0), 4);
  EXPECT_EQ(P.set.n_nondeg(1), 5);
  EXPECT_EQ(P.set.n_nondeg(2), 2);
  EXPECT_TRUE(check_simplicial(P.set).empty());
}

TEST(Simp, ProductsOfSimplicesMatchGridChains) {
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) {
      auto P = product(standard_simplex(p), standard_simplex(q));
      for (int n = 0; n <= p + q; ++n) EXPECT_EQ(P.set.n_nondeg(n), grid_chains(p, q, n)) << p << "x" << q << " n=" << n;
      EXPECT_TRUE(check_simplicial(P.set).empty());
    }
}

TEST(Simp, CircleTimesPointIsCircle) {
  auto S = simplicial_circle();
  EXPECT_TRUE(check_simplicial(S).empty());
  auto P = product(S, standard_simplex(0));
  EXPECT_EQ(P.set.count, S.count);
  EXPECT_EQ(P.set.face[1][0][0].base_dim(), 0);
}

TEST(Simp, RandomProductsAreSimplicial) {
  Rng rng(5);
  for (int i = 0; i < 15; ++i) {
    auto S = random_small_set(rng, 2), T = random_small_set(rng, 2);
    ASSERT_TRUE(check_simplicial(S).empty());
    auto P = product(S, T);
    EXPECT_TRUE(check_simplicial(P.set).empty());
    // vertices of a product are pairs of vertices
    EXPECT_EQ(P.set.n_nondeg(0), S.n_nondeg(0) * T.n_nondeg(0));
  }
}

TEST(Simp, TruncatedProductNeedsDimension) {
  auto S = standard_simplex(2);
  S.exact = false;
  EXPECT_THROW(product(S, standard_simplex(1)), std::invalid_argument);
  EXPECT_THROW(product(S, standard_simplex(1), 3), std::out_of_range);
  EXPECT_NO_THROW(product(S, standard_simplex(1), 2));
}

TEST(Simp, BrokenFaceIdentityIsReported) {
  auto S = standard_simplex(2);
  std::swap(S.face[2][0][0], S.face[2][0][2]);
  EXPECT_FALSE(check_simplicial(S).empty());
}

TEST(Simp, InclusionOfVertexCommutesWithFaces) {
  auto pt = standard_simplex(0), d1 = standard_simplex(1);
  SimplicialMap f{&pt, &d1, {{nondeg(0, 1)}}};
  EXPECT_TRUE(check_simplicial_map(f).empty());
  // collapse of the edge onto vertex 0
  SimplicialMap g{&d1, &pt, {{nondeg(0, 0), nondeg(0, 0)}, {Simplex{{0, 0}, 0}}}};
  EXPECT_TRUE(check_simplicial_map(g).empty());
  SimplicialMap bad{&d1, &d1, {{nondeg(0, 0), nondeg(0, 1)}, {Simplex{{0, 0}, 1}}}};
  EXPECT_FALSE(check_simplicial_map(bad).empty());
}

#include <gtest/gtest.h>

#include "field_names.hpp"
#include "dsec/suites.hpp"

using namespace dsec;

namespace {

std::vector<int> convolve(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<int> c(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// homology ranks as a dense vector starting at degree lo
template <class K>
std::vector<int> homology_vec(const ChainComplex<K>& c, int lo, int hi) {
  auto h = homology(c);
  std::vector<int> v;
  for (int n = lo; n <= hi; ++n) v.push_back(h.count(n) ? h[n] : 0);
  return v;
}

template <class K>
Cx<K> interval() {
  return normalized_chains<K>(standard_simplex(1));
}

}  // namespace

template <class K>
class ChainTest : public ::testing::Test {};
using Fields = ::testing::Types<Fp, Q>;
TYPED_TEST_SUITE(ChainTest, Fields, FieldName);

TYPED_TEST(ChainTest, ValidateNamesTheBadDegree) {
  using K = TypeParam;
  Matrix<K> one(1, 1);
  one(0, 0) = K(1);
  auto c = make_complex<K>(0, {1, 1, 1}, {{1, one}, {2, one}});
  try {
    validate(*c);
    FAIL() << "validate accepted d∘d ≠ 0";
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "d∘d ≠ 0 at degree 2");
  }
  EXPECT_THROW(make_complex<K>(0, {1, 2}, {{1, one}}), std::invalid_argument);
}

TYPED_TEST(ChainTest, SmallHomology) {
  using K = TypeParam;
  EXPECT_TRUE(homology(*zero_complex<K>()).empty());
  auto h = homology(*normalized_chains<K>(simplicial_circle()));
  EXPECT_EQ(h, (std::map<int, int>{{0, 1}, {1, 1}}));
  EXPECT_EQ(homology(*normalized_chains<K>(standard_simplex(3))), (std::map<int, int>{{0, 1}}));
  Matrix<K> one(1, 1);
  one(0, 0) = K(1);
  EXPECT_TRUE(is_acyclic(*make_complex<K>(0, {1, 1}, {{1, one}})));
  EXPECT_EQ(homology_str(*normalized_chains<K>(simplicial_circle())), "H0=1,H1=1");
}

TYPED_TEST(ChainTest, HomologyMatchesGeneratedShape) {
  using K = TypeParam;
  Rng rng(21);
  for (int i = 0; i < 50; ++i) {
    auto s = random_shape(rng, 20);
    auto C = random_complex<K>(rng, s);
    ASSERT_NO_THROW(validate(*C));
    auto h = homology(*C);
    for (int k = 0; k < int(s.h.size()); ++k) EXPECT_EQ(h.count(s.lo + k) ? h[s.lo + k] : 0, s.h[k]);
  }
}

TYPED_TEST(ChainTest, QuasiIsoAgreesWithOracle) {
  using K = TypeParam;
  Rng rng(22);
  for (int i = 0; i < 60; ++i) {
    auto m = random_map<K>(rng, 18);
    ASSERT_TRUE(is_chain_map(m.f));
    bool expect = !m.lambda_zero || homology(*m.f.src).empty();
    EXPECT_EQ(is_quasi_iso(m.f), expect);
    EXPECT_EQ(is_quasi_iso(m.f), homology_iso_oracle(m.f));
  }
}

TYPED_TEST(ChainTest, ZeroMapIntoCircleIsNotQuasiIso) {
  using K = TypeParam;
  auto S = normalized_chains<K>(simplicial_circle());
  EXPECT_TRUE(is_quasi_iso(identity_map(S)));
  EXPECT_FALSE(is_quasi_iso(zero_map(zero_complex<K>(), S)));
  EXPECT_TRUE(is_acyclic(*cone(identity_map(S))));
}

TYPED_TEST(ChainTest, IntervalSquaredDims) {
  using K = TypeParam;
  auto I = interval<K>();
  auto T = tensor(I, I);
  EXPECT_EQ(T->dims, (std::vector<int>{4, 4, 1}));
  EXPECT_TRUE(d_squared_zero(*T));
  EXPECT_EQ(homology(*T), (std::map<int, int>{{0, 1}}));
}

TYPED_TEST(ChainTest, TensorDimsAndHomologyConvolve) {
  using K = TypeParam;
  Rng rng(23);
  for (int i = 0; i < 25; ++i) {
    auto A = random_complex<K>(rng, 8), B = random_complex<K>(rng, 8);
    auto T = tensor(A, B);
    if (A->total_dim() == 0 || B->total_dim() == 0) {
      EXPECT_EQ(T->total_dim(), 0);
      continue;
    }
    EXPECT_EQ(T->lo, A->lo + B->lo);
    EXPECT_EQ(T->dims, convolve(A->dims, B->dims));
    EXPECT_TRUE(d_squared_zero(*T));
    int lo = A->lo + B->lo, hi = A->hi() + B->hi();
    EXPECT_EQ(homology_vec(*T, lo, hi),
              convolve(homology_vec(*A, A->lo, A->hi()), homology_vec(*B, B->lo, B->hi())));
  }
}

TYPED_TEST(ChainTest, UnitIsNeutralForTensor) {
  using K = TypeParam;
  Rng rng(24);
  for (int i = 0; i < 10; ++i) {
    auto C = random_complex<K>(rng, 10);
    EXPECT_TRUE(same_complex(tensor(unit_complex<K>(), C), C));
    EXPECT_TRUE(same_complex(tensor(C, unit_complex<K>()), C));
  }
}

TYPED_TEST(ChainTest, DirectSumRetractions) {
  using K = TypeParam;
  Rng rng(25);
  auto A = random_complex<K>(rng, 6), B = random_complex<K>(rng, 6);
  auto S = direct_sum<K>({A, B});
  for (int p = 0; p < 2; ++p) {
    auto c = compose(projection(S, p), injection(S, p));
    EXPECT_TRUE(maps_equal(c, identity_map(S.parts[p])));
  }
  EXPECT_TRUE(compose(projection(S, 1), injection(S, 0)).comps.empty() ||
              maps_equal(compose(projection(S, 1), injection(S, 0)), zero_map(A, B)));
}

TYPED_TEST(ChainTest, ShiftMovesHomology) {
  using K = TypeParam;
  auto S = normalized_chains<K>(simplicial_circle());
  EXPECT_EQ(homology(*shift(S, 2)), (std::map<int, int>{{2, 1}, {3, 1}}));
}

TYPED_TEST(ChainTest, IntervalBoundary) {
  using K = TypeParam;
  auto I = interval<K>();
  auto d = I->d(1);
  EXPECT_EQ(d(0, 0), K(-1));
  EXPECT_EQ(d(1, 0), K(1));
}

TYPED_TEST(ChainTest, DiagonalOnVertexAndEdge) {
  using K = TypeParam;
  auto a0 = aw_diagonal<K>(0);
  const auto& W0 = *word_cx<K>({{0, a0.src}, {1, a0.src}});
  ASSERT_EQ(a0.at(0).rows(), 1);
  EXPECT_EQ(a0.at(0)(0, 0), K(1));
  EXPECT_EQ(W0.tup[0][0], (std::vector<int>{0, 0}));

  // flat basis of C(Δ^1): 0 = [0], 1 = [1], 2 = [01]
  auto a1 = aw_diagonal<K>(1);
  const auto& W = *word_cx<K>({{0, a1.src}, {1, a1.src}});
  std::map<std::vector<int>, K> img;
  auto m = a1.at(1);
  for (int i = 0; i < m.rows(); ++i)
    if (m(i, 0) != K(0)) img[W.tup[1 - W.cx->lo][i]] = m(i, 0);
  EXPECT_EQ(img, (std::map<std::vector<int>, K>{{{0, 2}, K(1)}, {{2, 1}, K(1)}}));
  auto v = a1.at(0);
  std::map<std::vector<int>, K> img0;
  for (int i = 0; i < v.rows(); ++i)
    if (v(i, 1) != K(0)) img0[W.tup[0 - W.cx->lo][i]] = v(i, 1);
  EXPECT_EQ(img0, (std::map<std::vector<int>, K>{{{1, 1}, K(1)}}));
}

TYPED_TEST(ChainTest, DiagonalCounitAndCoassociativity) {
  using K = TypeParam;
  SuiteResult r{"aw"};
  aw_checks<K>(r, 3);
  EXPECT_TRUE(r.ok()) << (r.messages.empty() ? "" : r.messages[0]);
}

TYPED_TEST(ChainTest, CoassociativityDetectsPerturbation) {
  using K = TypeParam;
  auto aw = aw_diagonal<K>(2);
  auto& m = aw.comps[1];
  for (int i = 0; i < m.rows(); ++i)
    if (m(i, 0) != K(0)) {
      m(i, 0) = K(2);
      break;
    }
  EXPECT_FALSE(aw_coassociative(aw));
}

TYPED_TEST(ChainTest, SparseCoassociativityMatchesTripleTensor) {
  using K = TypeParam;
  for (int n = 0; n <= 2; ++n) {
    auto aw = aw_diagonal<K>(n);
    auto C = aw.src;
    auto w0 = word_cx<K>({{0, C}}), w1 = word_cx<K>({{1, C}}), w2 = word_cx<K>({{2, C}});
    auto w01 = word_cx<K>({{0, C}, {1, C}}), w12 = word_cx<K>({{1, C}, {2, C}});
    auto left = compose(tensor_maps<K>({w0, w2}, {w01, w2}, {aw, identity_map(C)}),
                        compose(tensor_maps<K>({w0, w1}, {w0, w2}, {identity_map(C), identity_map(C)}), aw));
    auto right = compose(tensor_maps<K>({w0, w1}, {w0, w12}, {identity_map(C), aw}), aw);
    EXPECT_EQ(maps_equal(left, right), aw_coassociative(aw)) << n;
  }
}

TYPED_TEST(ChainTest, AugmentationIsQuasiIso) {
  using K = TypeParam;
  for (int n = 0; n <= 4; ++n) EXPECT_TRUE(is_quasi_iso(augmentation<K>(n))) << n;
}

TYPED_TEST(ChainTest, SimplicialTensors) {
  using K = TypeParam;
  Rng rng(26);
  auto C = random_complex<K>(rng, 6);
  auto T = sset_tensor(discrete_set(3), C);
  std::vector<int> three;
  for (int d : C->dims) three.push_back(3 * d);
  if (C->total_dim()) EXPECT_EQ(T->dims, three);
  auto k = unit_complex<K>();
  EXPECT_EQ(homology(*sset_tensor(simplicial_circle(), k)), (std::map<int, int>{{0, 1}, {1, 1}}));
  EXPECT_EQ(delta_tensor(2, k)->dims, (std::vector<int>{3, 3, 1}));
}

TYPED_TEST(ChainTest, ConstantObjectRealizesToItself) {
  using K = TypeParam;
  Rng rng(27);
  for (int i = 0; i < 10; ++i) {
    auto C = random_complex<K>(rng, 10);
    auto X = constant_nsimp(C);
    auto R = realize(X);
    auto inc = level0_inclusion(X, R, 0);
    EXPECT_TRUE(is_chain_map(inc));
    EXPECT_TRUE(is_quasi_iso(inc));
  }
}

TYPED_TEST(ChainTest, SplitAugmentedObjectsAreEquivalent) {
  using K = TypeParam;
  Rng rng(28);
  for (int i = 0; i < 10; ++i) {
    auto A = random_split_augmented<K>(rng, 3, 8);
    ASSERT_TRUE(check_split_augmented(A).empty());
    auto v = split_augmented_equivalence(A);
    EXPECT_TRUE(v.composite_identity);
    EXPECT_TRUE(v.in_qi);
    EXPECT_TRUE(v.out_qi);
  }
}

TYPED_TEST(ChainTest, BrokenSplittingIsReported) {
  using K = TypeParam;
  Rng rng(29);
  SplitAugmented<K> A;
  do A = random_split_augmented<K>(rng, 2, 6);
  while (A.xm1->total_dim() == 0);
  for (auto& [n, m] : A.eta.comps) m = m.scaled(K(2));
  EXPECT_FALSE(check_split_augmented(A).empty());
  EXPECT_FALSE(split_augmented_equivalence(A).composite_identity);
}

TYPED_TEST(ChainTest, FreeBisimplicialTotalsComputeProductHomology) {
  using K = TypeParam;
  auto S = simplicial_circle(), T = standard_simplex(1);
  auto k = unit_complex<K>();
  auto id = [&](int, int, int, int, int) { return identity_map(k); };
  auto X = free_bisimp<K>(S, T, [&](int, int, int, int) { return k; }, id, id);
  ASSERT_TRUE(check_nbisimp(X).empty());
  auto expect = homology(*normalized_chains<K>(product(S, T).set));
  EXPECT_EQ(homology(*realize_bisimplicial(X, 12).cx), expect);
  EXPECT_EQ(homology(*realize_bisimplicial(X, 21).cx), expect);
  auto D = diagonal(X, 2);
  auto P = product(S, T).set;
  for (int n = 0; n <= 2; ++n) EXPECT_EQ(int(D.keys[n].size()), P.n_nondeg(n));
  EXPECT_EQ(homology(*realize(D.X).cx), expect);
}

TYPED_TEST(ChainTest, OrdersAndDiagonalAgree) {
  using K = TypeParam;
  SuiteResult r{"bisimp"};
  Rng rng(30);
  bisimplicial_checks<K>(r, rng, 8, 2);
  EXPECT_TRUE(r.ok()) << (r.messages.empty() ? "" : r.messages[0]);
}

TYPED_TEST(ChainTest, TransposeSwapsTheOrders) {
  using K = TypeParam;
  Rng rng(31);
  for (int i = 0; i < 8; ++i) {
    auto X = random_bisimplicial<K>(rng, 2, 5);
    auto XT = transpose(X);
    ASSERT_TRUE(check_nbisimp(XT).empty());
    auto a = realize_bisimplicial(X, 12), b = realize_bisimplicial(XT, 21);
    EXPECT_EQ(homology(*a.cx), homology(*b.cx));
    EXPECT_EQ(a.cx->dims, b.cx->dims);
  }
}

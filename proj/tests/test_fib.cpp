#include <gtest/gtest.h>

#include <set>

#include "field_names.hpp"
#include "dsec/fixtures.hpp"
#include "dsec/gen.hpp"

using namespace dsec;

namespace {

// {0 < 1} -> Cat: P = {p0 < p1} over 0, Q = {q} over 1, u constant
CatFamily resolution_family() {
  auto B = poset(2, {{0, 1}});
  auto P = poset(2, {{0, 1}}, {"p0", "p1"});
  auto Qc = poset(1, {}, {"q"});
  CatFamily E;
  E.base = B;
  E.fiber = {P, Qc};
  for (int f = 0; f < B->nmor(); ++f) {
    if (f == B->ident[0]) E.trans.push_back(identity_functor(P));
    else if (f == B->ident[1]) E.trans.push_back(identity_functor(Qc));
    else E.trans.push_back(constant_functor(P, Qc, 0));
  }
  return E;
}

bool fiber_iso(const FinCategory& c, int a) {
  for (int b : c.hom(c.tgt[a], c.src[a]))
    if (c.comp[b][a] == c.ident[c.src[a]] && c.comp[a][b] == c.ident[c.tgt[a]]) return true;
  return false;
}

// random strict family over [2] = {0 < 1 < 2}, fibers random posets
CatFamily random_chain_family(Rng& rng) {
  auto B = ordinal(2);
  CatFamily E;
  E.base = B;
  for (int c = 0; c < 3; ++c) {
    int n = rng.uniform(1, 3);
    std::vector<std::pair<int, int>> rel;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (rng.coin()) rel.push_back({a, b});
    E.fiber.push_back(poset(n, rel));
  }
  auto pick = [&](int a, int b) {
    auto fs = enumerate_functors(E.fiber[a], E.fiber[b], 200);
    return fs[rng.uniform(0, int(fs.size()) - 1)];
  };
  auto f01 = pick(0, 1), f12 = pick(1, 2);
  E.trans.resize(B->nmor());
  for (int f = 0; f < B->nmor(); ++f) {
    int s = B->src[f], t = B->tgt[f];
    if (s == t) E.trans[f] = identity_functor(E.fiber[s]);
    else if (s == 0 && t == 1) E.trans[f] = f01;
    else if (s == 1 && t == 2) E.trans[f] = f12;
    else E.trans[f] = compose(f12, f01);
  }
  return E;
}

}  // namespace

TEST(Fib, ConstantPointFamilyTotalIsBase) {
  auto B = poset(3, {{0, 1}, {0, 2}});
  auto T = grothendieck(constant_family(B, point_category()));
  EXPECT_EQ(T.cat->nobj(), B->nobj());
  EXPECT_EQ(T.cat->nmor(), B->nmor());
  EXPECT_TRUE(check_category(*T.cat).empty());
  EXPECT_TRUE(check_opfibration(T.proj).empty());
}

TEST(Fib, ResolutionFamilyTotal) {
  auto E = resolution_family();
  ASSERT_TRUE(check_family(E).empty());
  auto T = grothendieck(E);
  EXPECT_EQ(T.cat->nobj(), 3);
  int expect = 0;
  const auto& B = *E.base;
  for (int f = 0; f < B.nmor(); ++f)
    for (int x = 0; x < E.fiber[B.src[f]]->nobj(); ++x)
      for (int y = 0; y < E.fiber[B.tgt[f]]->nobj(); ++y)
        expect += int(E.fiber[B.tgt[f]]->hom(E.trans[f].obj[x], y).size());
  EXPECT_EQ(T.cat->nmor(), expect);
  EXPECT_EQ(expect, 6);
  EXPECT_TRUE(check_category(*T.cat).empty());
  EXPECT_TRUE(check_opfibration(T.proj).empty());
  // fibers of the projection
  for (int c = 0; c < 2; ++c) {
    auto F = functor_fiber(T.proj, c);
    EXPECT_EQ(F.cat->nobj(), E.fiber[c]->nobj());
    EXPECT_EQ(F.cat->nmor(), E.fiber[c]->nmor());
  }
}

TEST(Fib, IdentityComponentsAreOpcartesian) {
  auto E = resolution_family();
  auto T = grothendieck(E);
  for (int m = 0; m < T.cat->nmor(); ++m) {
    auto [f, a] = T.mor[m];
    const auto& fib = *E.fiber[E.base->tgt[f]];
    if (fib.is_identity(a)) EXPECT_TRUE(is_opcartesian(T.proj, m)) << T.cat->mor_names[m];
  }
  // p0 -> p1 over the identity is not invertible
  int m = T.cat->hom(T.obj_index.at({0, 0}), T.obj_index.at({0, 1}))[0];
  EXPECT_FALSE(is_opcartesian(T.proj, m));
}

TEST(Fib, OpcartesianCountsMatchFiberIsomorphisms) {
  Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    auto E = random_chain_family(rng);
    ASSERT_TRUE(check_family(E).empty());
    auto T = grothendieck(E);
    int got = 0, want = 0;
    for (int m = 0; m < T.cat->nmor(); ++m) {
      got += is_opcartesian(T.proj, m);
      auto [f, a] = T.mor[m];
      want += fiber_iso(*E.fiber[E.base->tgt[f]], a);
    }
    EXPECT_EQ(got, want);
    EXPECT_TRUE(check_opfibration(T.proj).empty());
  }
}

TEST(Fib, ArrowOntoNontrivialGroupIsNotAnOpfibration) {
  auto I = poset(2, {{0, 1}});
  auto G = monoid({{0, 1}, {1, 0}});
  FinFunctor p{I, G, {0, 0}, {}};
  for (int f = 0; f < I->nmor(); ++f) p.mor.push_back(I->is_identity(f) ? 0 : 1);
  ASSERT_TRUE(check_functor(p).empty());
  EXPECT_FALSE(check_opfibration(p).empty());
  EXPECT_TRUE(check_opfibration(identity_functor(G)).empty());
}

TEST(Fib, TransposeFlipsVariance) {
  auto B = poset(2, {{0, 1}});
  auto E = constant_family(B, poset(2, {{0, 1}}));
  auto T = transpose(E);
  EXPECT_TRUE(T.contravariant);
  EXPECT_EQ(T.base->hom(1, 0).size(), 1u);
  EXPECT_TRUE(check_family(T).empty());
  EXPECT_TRUE(check_fibration(grothendieck(T).proj).empty());
  Rng rng(42);
  for (int i = 0; i < 10; ++i) {
    auto R = random_chain_family(rng);
    EXPECT_TRUE(same_family(transpose(transpose(R)), R));
  }
}

TEST(Fib, ChainTransposeKeepsTransitions) {
  auto FS = finstar(2);
  auto E = mtensor_opfib<Fp>(FS);
  auto T = transpose(E);
  for (int f = 0; f < FS.cat->nmor(); ++f) {
    EXPECT_EQ(T.base->src[f], FS.cat->tgt[f]);
    EXPECT_TRUE(same_transition(T.transition(f), E.trans[f]));
  }
}

TEST(Fib, PullbackAlongIdentityAndTranspose) {
  Rng rng(43);
  for (int i = 0; i < 10; ++i) {
    auto E = random_chain_family(rng);
    EXPECT_TRUE(same_family(pullback(identity_functor(E.base), E), E));
    auto D = ordinal(1);
    auto Fs = enumerate_functors(D, E.base, 50);
    auto& F = Fs[rng.uniform(0, int(Fs.size()) - 1)];
    auto lhs = transpose(pullback(F, E));
    auto ET = transpose(E);
    auto rhs = pullback(opposite_functor(F, lhs.base, ET.base), ET);
    EXPECT_TRUE(same_family(lhs, rhs));
  }
}

TEST(Fib, ChainPullbackReindexes) {
  auto X = collapse_fixture();
  auto E = collapse_opfib<Fp>(X.C, true);
  auto P = pullback(X.F, E);
  EXPECT_TRUE(check_strictness(P).empty());
  for (int u = 0; u < X.D->nmor(); ++u) EXPECT_TRUE(same_transition(P.trans[u], E.trans[X.F.mor[u]]));
  EXPECT_EQ(P.grade, (std::vector<int>{0, 0, 1}));
}

TEST(Fib, PowerByPointIsTheFamily) {
  auto E = resolution_family();
  auto P = power(E, point_category());
  ASSERT_TRUE(check_family(P.family).empty());
  for (int c = 0; c < E.base->nobj(); ++c) {
    EXPECT_EQ(P.family.fiber[c]->nobj(), E.fiber[c]->nobj());
    EXPECT_EQ(P.family.fiber[c]->nmor(), E.fiber[c]->nmor());
  }
}

TEST(Fib, SectionsOfPoweredFibrationBiject) {
  auto C = poset(2, {{0, 1}}, {"x", "y"});
  // O: point over x, {0 < 1} over y, x-transition picks 0
  CatFamily O;
  O.base = C;
  O.fiber = {point_category(), poset(2, {{0, 1}})};
  // F: {0 < 1} over both, identity restriction
  auto two = poset(2, {{0, 1}});
  CatFamily F = constant_family(C, two, true);
  for (int f = 0; f < C->nmor(); ++f) {
    if (f == C->ident[0]) O.trans.push_back(identity_functor(O.fiber[0]));
    else if (f == C->ident[1]) O.trans.push_back(identity_functor(O.fiber[1]));
    else O.trans.push_back(constant_functor(O.fiber[0], O.fiber[1], 0));
  }
  ASSERT_TRUE(check_family(O).empty());
  ASSERT_TRUE(check_family(F).empty());
  auto TO = grothendieck(O);
  auto pulled = pullback(TO.proj, F);
  auto FO = power_fib(F, O);
  ASSERT_TRUE(check_family(FO.family).empty());
  auto lhs = enumerate_sections(pulled);
  auto rhs = enumerate_sections(FO.family);
  EXPECT_EQ(lhs.size(), rhs.size());
  EXPECT_FALSE(rhs.empty());
  std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
  for (auto& S : rhs) {
    auto T = power_section_to_total(F, O, FO, TO, S);
    EXPECT_TRUE(check_section(pulled, T).empty());
    seen.insert({T.obj, T.mor});
  }
  EXPECT_EQ(seen.size(), rhs.size());
}

TEST(Fib, FinStarSizesAndInertMaps) {
  auto FS = finstar(2);
  int expect = 0;
  for (int n = 0; n <= 2; ++n)
    for (int m = 0; m <= 2; ++m) {
      int c = 1;
      for (int i = 0; i < n; ++i) c *= m + 1;
      expect += c;
    }
  EXPECT_EQ(FS.cat->nmor(), expect);
  EXPECT_TRUE(check_category(*FS.cat).empty());
  EXPECT_FALSE(is_inert(FS, FS.find(2, 1, {0, 0})));
  EXPECT_TRUE(is_inert(FS, FS.find(2, 1, {0, -1})));
  EXPECT_TRUE(is_inert(FS, FS.find(2, 2, {1, 0})));
  EXPECT_FALSE(is_inert(FS, FS.find(0, 1, {})));
  int e = FS.find(0, 1, {});
  for (int g : FS.cat->hom(1, 2)) {
    int ge = FS.cat->comp[g][e];
    EXPECT_TRUE(FS.pmap[ge].empty());
  }
  EXPECT_THROW(finstar(5), std::invalid_argument);
}

template <class K>
class FibChainTest : public ::testing::Test {};
using Fields = ::testing::Types<Fp, Q>;
TYPED_TEST_SUITE(FibChainTest, Fields, FieldName);

TYPED_TEST(FibChainTest, TensorTransitions) {
  using K = TypeParam;
  auto FS = finstar(2);
  auto E = mtensor_opfib<K>(FS);
  Rng rng(44);
  auto X1 = random_complex<K>(rng, 5), X2 = random_complex<K>(rng, 5);
  FiberObj<K> x{{{0, X1}}, {{1, X2}}};
  auto y = apply_obj(E.trans[FS.find(2, 1, {0, 0})], x);
  ASSERT_EQ(y.size(), 1u);
  EXPECT_TRUE(same_complex(slot_cx(y, 0), tensor(X1, X2)));
  auto z = apply_obj(E.trans[FS.find(0, 1, {})], FiberObj<K>{});
  ASSERT_EQ(z.size(), 1u);
  EXPECT_TRUE(same_complex(slot_cx(z, 0), unit_complex<K>()));
  auto w = apply_obj(E.trans[FS.find(2, 1, {-1, 0})], x);
  EXPECT_TRUE(same_complex(slot_cx(w, 0), X2));
}

TYPED_TEST(FibChainTest, MTensorIsStrict) {
  using K = TypeParam;
  for (int N = 0; N <= 3; ++N) EXPECT_TRUE(check_strictness(mtensor_opfib<K>(finstar(N))).empty()) << N;
}

TYPED_TEST(FibChainTest, TransitionsComposeOnRandomMaps) {
  using K = TypeParam;
  auto FS = finstar(2);
  auto E = mtensor_opfib<K>(FS);
  const auto& B = *FS.cat;
  Rng rng(45);
  for (int trial = 0; trial < 4; ++trial) {
    // a random fiber map at 2: scalar automorphisms of random complexes
    FiberObj<K> x;
    FiberMap<K> h;
    for (int s = 0; s < 2; ++s) {
      auto C = random_complex<K>(rng, 4);
      x.push_back({{s, C}});
      auto m = identity_map(C);
      for (auto& [n, mm] : m.comps) mm = mm.scaled(random_scalar<K>(rng, true));
      h.comps.push_back(m);
    }
    h.src = h.tgt = x;
    for (int f = 0; f < B.nmor(); ++f) {
      if (B.src[f] != 2) continue;
      for (int g = 0; g < B.nmor(); ++g) {
        if (B.src[g] != B.tgt[f]) continue;
        int gf = B.comp[g][f];
        auto a = apply_map(E.trans[gf], h);
        auto b = apply_map(E.trans[g], apply_map(E.trans[f], h));
        EXPECT_TRUE(fiber_maps_equal(a, b)) << B.mor_names[g] << "∘" << B.mor_names[f];
      }
    }
  }
}

TYPED_TEST(FibChainTest, QuasiIsosStayQuasiIsos) {
  using K = TypeParam;
  auto FS = finstar(2);
  auto E = mtensor_opfib<K>(FS);
  Rng rng(46);
  for (int i = 0; i < 5; ++i) {
    auto m1 = random_map<K>(rng, 6), m2 = random_map<K>(rng, 6);
    if (m1.lambda_zero || m2.lambda_zero) continue;
    FiberMap<K> h{{{{0, m1.f.src}}, {{1, m2.f.src}}}, {{{0, m1.f.tgt}}, {{1, m2.f.tgt}}}, {m1.f, m2.f}};
    ASSERT_TRUE(fiber_is_quasi_iso(h));
    for (int f = 0; f < FS.cat->nmor(); ++f)
      if (FS.cat->src[f] == 2) EXPECT_TRUE(fiber_is_quasi_iso(apply_map(E.trans[f], h)));
  }
}

TYPED_TEST(FibChainTest, GroundFieldSectionIsTrivial) {
  using K = TypeParam;
  auto FS = finstar(3);
  auto E = mtensor_opfib<K>(FS);
  auto S = algebra_to_section(FS, E, ground_field_algebra<K>());
  EXPECT_TRUE(check_chain_section(E, S).empty());
  for (auto& m : S.mor)
    for (auto& c : m.comps) EXPECT_EQ(c.at(0), Matrix<K>::identity(1));
}

TYPED_TEST(FibChainTest, DualNumbersMultiplication) {
  using K = TypeParam;
  auto FS = finstar(2);
  auto E = mtensor_opfib<K>(FS);
  auto R = dual_numbers<K>();
  ASSERT_TRUE(check_algebra(R).empty());
  auto S = algebra_to_section(FS, E, R);
  EXPECT_TRUE(check_chain_section(E, S).empty());
  int f = FS.find(2, 1, {0, 0});
  const auto& c = S.mor[f].comps[0];
  auto W = word_cx(S.mor[f].src[0]);
  auto m = c.at(0);
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 4);
  // basis 0 = 1, 1 = t; e_a e_b = e_{a+b} below 2
  for (int col = 0; col < 4; ++col) {
    auto t = W->tup[0 - W->cx->lo][col];
    int deg = t[0] + t[1];
    for (int row = 0; row < 2; ++row) EXPECT_EQ(m(row, col), K(row == deg ? 1 : 0));
  }
}

TYPED_TEST(FibChainTest, InertComponentsAreIsomorphisms) {
  using K = TypeParam;
  auto FS = finstar(2);
  auto E = mtensor_opfib<K>(FS);
  auto S = algebra_to_section(FS, E, dual_numbers<K>());
  for (int f = 0; f < FS.cat->nmor(); ++f) {
    if (!is_inert(FS, f)) continue;
    for (auto& c : S.mor[f].comps) {
      for (int n = c.src->lo; n <= c.src->hi(); ++n) {
        auto m = c.at(n);
        ASSERT_EQ(m.rows(), m.cols());
        EXPECT_EQ(rank(m), m.rows()) << FS.cat->mor_names[f];
      }
    }
  }
}

TYPED_TEST(FibChainTest, NonAssociativeAlgebraIsRejected) {
  using K = TypeParam;
  // basis 1, a, b: aa = b, bb = a, ab = 0
  auto A = make_complex<K>(0, {3});
  auto W = word_cx<K>({{0, A}, {1, A}});
  Matrix<K> m(3, 9);
  auto prod = [](int x, int y) -> int {
    if (x == 0) return y;
    if (y == 0) return x;
    if (x == 1 && y == 1) return 2;
    if (x == 2 && y == 2) return 1;
    return -1;
  };
  for (int col = 0; col < 9; ++col) {
    auto t = W->tup[0][col];
    int p = prod(t[0], t[1]);
    if (p >= 0) m(p, col) = K(1);
  }
  ChainMap<K> mu{W->cx, A, {{0, m}}};
  Matrix<K> e(3, 1);
  e(0, 0) = K(1);
  DgAlgebra<K> R{A, mu, ChainMap<K>{unit_complex<K>(), A, {{0, e}}}};
  auto bad = check_algebra(R);
  ASSERT_FALSE(bad.empty());
  EXPECT_EQ(bad[0], "multiplication is not associative");
  auto FS = finstar(2);
  EXPECT_THROW(algebra_to_section(FS, mtensor_opfib<K>(FS), R), std::invalid_argument);
}

TEST(Fib, RestrictionAlongIdentity) {
  auto C = poset(2, {{0, 1}});
  auto q = constant_family(C, poset(2, {{0, 1}}), true);
  auto I = identity_functor(C);
  auto R = restriction_map(identity_nat(I), q);
  for (int c = 0; c < 2; ++c) EXPECT_TRUE(same_functor(R[c], identity_functor(q.fiber[c])));
  EXPECT_THROW(restriction_map(identity_nat(I), transpose(q)), std::invalid_argument);
}

TEST(Fib, ComparisonIsNaturalOnConstantFibration) {
  auto C = poset(2, {{0, 1}});
  auto q = constant_family(C, poset(2, {{0, 1}}), true);
  auto D = point_category();
  auto F = constant_functor(D, C, 0), G = constant_functor(D, C, 1);
  NatTrans alpha{F, G, {C->hom(0, 1)[0]}};
  for (auto& A : enumerate_sections(q)) {
    auto th = section_comparison(alpha, q, A);
    EXPECT_EQ(th, (std::vector<int>{A.mor[alpha.comp[0]]}));
    EXPECT_TRUE(check_comparison_naturality(alpha, q, A).empty());
    auto R = restriction_map(alpha, q);
    EXPECT_TRUE(same_functor(R[0], identity_functor(q.fiber[0])));
  }
  auto I = identity_functor(C);
  for (auto& A : enumerate_sections(q)) EXPECT_TRUE(check_comparison_naturality(identity_nat(I), q, A).empty());
}

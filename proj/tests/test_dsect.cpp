#include <gtest/gtest.h>

#include "field_names.hpp"
#include "dsec/suites.hpp"

using namespace dsec;

namespace {

using RP = std::shared_ptr<const Replacement>;

RP replacement(const Cat& c, int L) { return std::make_shared<const Replacement>(simplicial_replacement(c, L)); }

template <class K>
ChainSection<K> constant_section(const ChainOpfib<K>& E, const Cx<K>& C) {
  ChainSection<K> S;
  const auto& B = *E.base;
  for (int c = 0; c < B.nobj(); ++c) S.obj.push_back({{{1, C}}});
  for (int f = 0; f < B.nmor(); ++f) S.mor.push_back(fiber_identity(S.obj[B.tgt[f]]));
  return S;
}

// {x < y}: S(x) = k, S(y) = k^2, S(x<y) the first inclusion
template <class K>
ChainSection<K> growing_section(const ChainOpfib<K>& E) {
  const auto& B = *E.base;
  auto k = ground<K>(), k2 = make_complex<K>(0, {2});
  ChainSection<K> S;
  S.obj = {{{{1, k}}}, {{{1, k2}}}};
  Matrix<K> i(2, 1);
  i(0, 0) = K(1);
  for (int f = 0; f < B.nmor(); ++f) {
    if (B.is_identity(f)) S.mor.push_back(fiber_identity(S.obj[B.src[f]]));
    else S.mor.push_back({S.obj[0], S.obj[1], {ChainMap<K>{k, k2, {{0, i}}}}});
  }
  return S;
}

Cat arrow() { return poset(2, {{0, 1}}, {"x", "y"}); }

int anchor_to_head(const Replacement& R, const Chain& x) {
  return R.find_mor(R.find(x), {0});
}

}  // namespace

TEST(Dsect, ArrowReplacement) {
  auto R = simplicial_replacement(arrow(), 1);
  EXPECT_EQ(R.objs.size(), 3u);
  int xy = R.find(Chain{0, {R.base->hom(0, 1)[0]}});
  int nonid = 0;
  for (int m : R.out[xy]) nonid += !is_identity_amap(R.mors[m].a, 1);
  EXPECT_EQ(nonid, 2);
  EXPECT_TRUE(R.exact());
}

TEST(Dsect, OneObjectReplacement) {
  auto R = simplicial_replacement(point_category(), 0);
  EXPECT_EQ(R.objs.size(), 1u);
  EXPECT_EQ(R.mors.size(), 1u);
}

TEST(Dsect, SquareReplacementCountsNerveSimplices) {
  auto sq = poset(4, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  auto R = simplicial_replacement(sq, 2);
  auto N = nerve(*sq, 2).set;
  EXPECT_EQ(int(R.objs.size()), N.n_nondeg(0) + N.n_nondeg(1) + N.n_nondeg(2));
}

TEST(Dsect, NonDirectBaseNeedsFullReplacement) {
  auto G = monoid({{0, 1}, {1, 0}});
  EXPECT_THROW(simplicial_replacement(G, 1, true), std::invalid_argument);
  auto R = simplicial_replacement(G, 1);
  EXPECT_FALSE(R.reduced);
  EXPECT_FALSE(R.exact());
  EXPECT_EQ(R.objs.size(), 1u + 2u);
}

TEST(Dsect, HeadAndTail) {
  auto C = arrow();
  Chain xy{0, {C->hom(0, 1)[0]}};
  EXPECT_EQ(head(xy), 0);
  EXPECT_EQ(tail(*C, xy), 1);
  EXPECT_EQ(head(Chain{1, {}}), 1);
  auto P = ordinal(2);
  auto R = simplicial_replacement(P, 2);
  for (auto& p : R.mors) {
    const auto& x = R.objs[p.src];
    const auto& y = R.objs[p.tgt];
    int h = head_morphism(*P, x, p.a), t = tail_morphism(*P, x, p.a);
    EXPECT_EQ(P->src[h], head(x));
    EXPECT_EQ(P->tgt[h], head(y));
    EXPECT_EQ(P->src[t], tail(*P, y));
    EXPECT_EQ(P->tgt[t], tail(*P, x));
  }
  // head is functorial: composite a-maps give composite head morphisms
  for (int m1 = 0; m1 < int(R.mors.size()); ++m1)
    for (int m2 : R.out[R.mors[m1].tgt]) {
      auto& p = R.mors[m1];
      auto& q = R.mors[m2];
      auto a = compose_amaps(p.a, q.a);
      int h = head_morphism(*P, R.objs[p.src], a);
      int h2 = P->compose(head_morphism(*P, R.objs[q.src], q.a), head_morphism(*P, R.objs[p.src], p.a));
      EXPECT_EQ(h, h2);
    }
}

TEST(Dsect, ClassifyArrowFaces) {
  auto C = arrow();
  Chain xy{0, {C->hom(0, 1)[0]}};
  EXPECT_EQ(classify(*C, xy, {0}), MorClass::Anchor);
  EXPECT_EQ(classify(*C, xy, {1}), MorClass::Structural);
  EXPECT_EQ(classify(*C, xy, {0, 1}), MorClass::Identity);
  // (x = x -> y) -> (x -> y) collapsing the repeated vertex
  Chain xxy{0, {C->ident[0], C->hom(0, 1)[0]}};
  EXPECT_EQ(classify(*C, xxy, {1, 2}), MorClass::Structural);
  EXPECT_EQ(classify(*C, xxy, {0, 1}), MorClass::Anchor);
  auto P = ordinal(2);
  Chain xyz{0, {P->hom(0, 1)[0], P->hom(1, 2)[0]}};
  EXPECT_EQ(classify(*P, xyz, {0, 2}), MorClass::Structural);
  EXPECT_EQ(classify(*P, xyz, {1}), MorClass::Neither);
}

TEST(Dsect, FactorizationIsUniqueAndRecomposes) {
  auto P = ordinal(2);
  auto R = simplicial_replacement(P, 2);
  for (int m = 0; m < int(R.mors.size()); ++m) {
    ASSERT_EQ(count_factorizations(R, m), 1) << m;
    auto f = factorize(R, m);
    EXPECT_EQ(R.mors[f.anchor].src, R.mors[m].src);
    EXPECT_EQ(R.mors[f.structural].tgt, R.mors[m].tgt);
    EXPECT_EQ(compose_amaps(R.mors[f.anchor].a, R.mors[f.structural].a), R.mors[m].a);
    auto k = classify(R, m);
    if (k == MorClass::Anchor) EXPECT_EQ(f.anchor, m);
    if (k == MorClass::Structural) EXPECT_EQ(f.structural, m);
  }
}

template <class K>
class DsectTest : public ::testing::Test {};
using Fields = ::testing::Types<Fp, Q>;
TYPED_TEST_SUITE(DsectTest, Fields, FieldName);

TYPED_TEST(DsectTest, EmbedConstantSection) {
  using K = TypeParam;
  Rng rng(51);
  auto P = ordinal(2);
  auto E = constant_opfib<K>(P);
  auto C = random_complex<K>(rng, 6);
  auto A = embed_section(E, constant_section(E, C), replacement(P, 2));
  EXPECT_TRUE(check_presection(A).empty());
  for (auto& v : A.val) EXPECT_TRUE(same_complex(slot_cx(v, 0), C));
  for (auto& c : A.comp) EXPECT_TRUE(fiber_maps_equal(c, fiber_identity(c.src)));
}

TYPED_TEST(DsectTest, EmbedTwistSection) {
  using K = TypeParam;
  auto C = arrow();
  auto E = twist_opfib<K>(C, {0, 1}, split_twist<K>());
  auto S = pushed_ground_section(E, 0);
  ASSERT_TRUE(check_chain_section(E, S).empty());
  auto R = replacement(C, 1);
  auto A = embed_section(E, S, R);
  EXPECT_TRUE(check_presection(A).empty());
  auto v = A.val[R->find(Chain{0, {C->hom(0, 1)[0]}})];
  EXPECT_EQ(slot_cx(v, 0)->dims, tensor(split_twist<K>(), ground<K>())->dims);
  EXPECT_EQ(v[0].size(), 2u);
}

TYPED_TEST(DsectTest, EmbedDualNumbers) {
  using K = TypeParam;
  SuiteResult r{"embed"};
  embed_checks<K>(r);
  EXPECT_TRUE(r.ok()) << (r.messages.empty() ? "" : r.messages[0]);
}

TYPED_TEST(DsectTest, AnchorInvertingValuesFactorThroughHead) {
  using K = TypeParam;
  auto C = arrow();
  auto E = constant_opfib<K>(C);
  auto R = replacement(C, 1);
  auto A = embed_section(E, growing_section(E), R);
  ASSERT_TRUE(check_presection(A).empty());
  for (int s = 0; s < int(R->objs.size()); ++s)
    EXPECT_TRUE(same_fiber_obj(A.val[s], A.val[R->find(Chain{head(R->objs[s]), {}})]));
  EXPECT_TRUE(is_derived_section(A).identity_anchors);
}

TYPED_TEST(DsectTest, CorruptedCocycleIsReported) {
  using K = TypeParam;
  auto P = ordinal(2);
  auto E = constant_opfib<K>(P);
  auto A = embed_section(E, constant_section(E, ground<K>()), replacement(P, 2));
  const auto& R = *A.R;
  int xyz = R.find(Chain{0, {P->hom(0, 1)[0], P->hom(1, 2)[0]}});
  int m = R.find_mor(xyz, {0, 1});
  for (auto& [n, mm] : A.comp[m].comps[0].comps) mm = mm.scaled(K(2));
  auto bad = check_presection(A);
  ASSERT_FALSE(bad.empty());
  EXPECT_EQ(bad[0].rfind("cocycle fails for ", 0), 0u) << bad[0];
  EXPECT_NE(bad[0].find("(0→1→2)"), std::string::npos) << bad[0];
}

TYPED_TEST(DsectTest, WeakEquivalences) {
  using K = TypeParam;
  auto C = arrow();
  auto E = constant_opfib<K>(C);
  auto R = replacement(C, 1);
  auto A = embed_section(E, constant_section(E, ground<K>()), R);
  PresectionMap<K> id;
  for (auto& v : A.val) id.comp.push_back(fiber_identity(v));
  EXPECT_TRUE(check_presection_map(A, A, id).empty());
  EXPECT_TRUE(is_weak_equivalence(id));

  auto P = acyclic_cone<K>();
  auto B = pad_presection(A, P);
  ASSERT_TRUE(check_presection(B).empty());
  PresectionMap<K> inc;
  for (int s = 0; s < int(R->objs.size()); ++s) {
    if (R->objs[s].length() == 0) {
      inc.comp.push_back(fiber_identity(A.val[s]));
      continue;
    }
    auto S = direct_sum<K>({slot_cx(A.val[s], 0), P});
    auto j = injection(S, 0);
    j.src = slot_cx(A.val[s], 0);
    j.tgt = slot_cx(B.val[s], 0);
    inc.comp.push_back({A.val[s], B.val[s], {j}});
  }
  EXPECT_TRUE(check_presection_map(A, B, inc).empty());
  EXPECT_TRUE(is_weak_equivalence(inc));
  for (auto& f : inc.comp)
    for (auto& c : f.comps) c = zero_map(c.src, c.tgt);
  EXPECT_FALSE(is_weak_equivalence(inc));
}

TYPED_TEST(DsectTest, DerivedIffAnchorLegIsQuasiIso) {
  using K = TypeParam;
  auto C = arrow();
  auto E = constant_opfib<K>(C);
  auto R = replacement(C, 1);
  Chain xy{0, {C->hom(0, 1)[0]}};
  for (int lam = 0; lam <= 2; ++lam) {
    auto A = embed_section(E, constant_section(E, ground<K>()), R);
    auto& g = A.comp[anchor_to_head(*R, xy)].comps[0];
    for (auto& [n, m] : g.comps) m = m.scaled(K(lam));
    ASSERT_TRUE(check_presection(A).empty());
    auto d = is_derived_section(A);
    EXPECT_EQ(d.ok, lam != 0);
    EXPECT_EQ(d.identity_anchors, lam == 1);
    EXPECT_EQ(d.anchors, 1);
  }
}

TYPED_TEST(DsectTest, RandomNonQuasiIsoAnchorIsRejected) {
  using K = TypeParam;
  Rng rng(52);
  auto C = arrow();
  auto E = constant_opfib<K>(C);
  auto R = replacement(C, 1);
  Chain xy{0, {C->hom(0, 1)[0]}};
  int tried = 0;
  while (tried < 10) {
    auto m = random_map<K>(rng, 8);
    if (!m.lambda_zero || homology(*m.f.src).empty()) continue;
    ++tried;
    // (x) carries the target, (x -> y) the source of m; y the target again
    auto Tg = m.f.tgt, Sr = m.f.src;
    Presection<K> A{E, R, {}, {}};
    for (auto& x : R->objs) A.val.push_back({{{1, x.length() ? Sr : Tg}}});
    for (auto& p : R->mors) {
      const auto& x = R->objs[p.src];
      if (is_identity_amap(p.a, x.length())) A.comp.push_back(fiber_identity(A.val[p.src]));
      else if (x.length() == 0) A.comp.push_back(fiber_identity(A.val[p.src]));
      else A.comp.push_back({A.val[p.src], A.val[p.tgt], {m.f}});
    }
    ASSERT_TRUE(check_presection(A).empty());
    EXPECT_EQ(is_derived_section(A).ok, is_quasi_iso(m.f));
    EXPECT_FALSE(is_derived_section(A).ok);
  }
}

TYPED_TEST(DsectTest, PullbackPresection) {
  using K = TypeParam;
  auto X = collapse_fixture();
  auto E = collapse_opfib<K>(X.C, true);
  auto RC = replacement(X.C, 1), RD = replacement(X.D, 2);
  auto A = embed_section(E, pushed_ground_section(E, 0), RC);
  auto same = pullback_presection(identity_functor(X.C), A, RC);
  for (int s = 0; s < int(RC->objs.size()); ++s) EXPECT_TRUE(same_fiber_obj(same.val[s], A.val[s]));
  auto B = pullback_presection(X.F, A, RD);
  EXPECT_TRUE(check_presection(B).empty());
  Chain p01{0, {X.D->hom(0, 1)[0]}};
  EXPECT_TRUE(same_fiber_obj(value_at(B, p01), A.val[RC->find(Chain{0, {}})]));
  EXPECT_TRUE(is_derived_section(B).ok);
  EXPECT_TRUE(is_locally_constant(B, X.F).ok);
  auto padded = pad_presection(A, acyclic_cone<K>());
  auto Bp = pullback_presection(X.F, padded, RD);
  EXPECT_TRUE(is_derived_section(Bp).ok);
  EXPECT_TRUE(is_locally_constant(Bp, X.F).ok);
}

TYPED_TEST(DsectTest, LocallyConstant) {
  using K = TypeParam;
  auto X = collapse_fixture();
  auto ED = pullback(X.F, constant_opfib<K>(X.C));
  auto RD = replacement(X.D, 2);
  auto good = embed_section(ED, collapse_independent_section(X, ED), RD);
  ASSERT_TRUE(check_presection(good).empty());
  EXPECT_TRUE(is_locally_constant(good, X.F).ok);
  auto bad = embed_section(ED, collapse_independent_section(X, ED, true), RD);
  auto r = is_locally_constant(bad, X.F);
  EXPECT_FALSE(r.ok);
  ASSERT_FALSE(r.failures.empty());
  EXPECT_NE(r.failures[0].find("over x"), std::string::npos);
  auto k = embed_section(ED, constant_section(ED, ground<K>()), RD);
  EXPECT_TRUE(is_locally_constant(k, X.F).ok);
}

TYPED_TEST(DsectTest, RealizeOverPoint) {
  using K = TypeParam;
  Rng rng(53);
  auto pt = point_category();
  auto E = constant_opfib<K>(pt);
  auto C = random_complex<K>(rng, 8);
  auto Z = realize_functor(embed_section(E, constant_section(E, C), replacement(pt, 0)));
  EXPECT_TRUE(same_complex(Z.R.cx, C) || Z.R.cx->dims == C->dims);
  EXPECT_TRUE(is_quasi_iso(Z.incl[0]));
}

TYPED_TEST(DsectTest, RealizeConstantOverArrow) {
  using K = TypeParam;
  Rng rng(54);
  auto C = arrow();
  auto E = constant_opfib<K>(C);
  auto V = random_complex<K>(rng, 8);
  auto Z = realize_functor(embed_section(E, constant_section(E, V), replacement(C, 1)));
  EXPECT_TRUE(Z.exact);
  for (auto& i : Z.incl) EXPECT_TRUE(is_quasi_iso(i));
}

TYPED_TEST(DsectTest, TerminalObjectAndPushoutShapes) {
  using K = TypeParam;
  SuiteResult r{"realize"};
  Rng rng(55);
  terminal_object_checks<K>(r, rng, 8);
  pushout_checks<K>(r, rng);
  EXPECT_TRUE(r.ok()) << (r.messages.empty() ? "" : r.messages[0]);
}

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

// sum over d of |Hom(F d, y)|
std::size_t slice_size(const FinFunctor& F, int y) {
  std::size_t n = 0;
  for (int d = 0; d < F.src->nobj(); ++d) n += F.tgt->hom(F.obj[d], y).size();
  return n;
}

bool mentions(const std::vector<std::string>& v, const std::string& s) {
  for (auto& x : v)
    if (x.find(s) != std::string::npos) return true;
  return false;
}

template <class K>
struct Collapse {
  CollapseFixture X = collapse_fixture();
  RP RD = replacement(X.D, 2), RC = replacement(X.C, 1);
  ChainOpfib<K> E;
  Presection<K> A, B;
  explicit Collapse(bool twist) : E(collapse_opfib<K>(X.C, twist)) {
    A = embed_section(E, pushed_ground_section(E, 0), RC);
    B = pullback_presection(X.F, A, RD);
  }
};

}  // namespace

TEST(Push, CollapseIsAResolution) {
  auto X = collapse_fixture();
  auto r = is_resolution<Fp>(X.F);
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(r.reasons.empty());
  EXPECT_FALSE(r.caveat.empty());
  EXPECT_TRUE(is_resolution<Q>(identity_functor(X.C)).ok);
}

TEST(Push, EmptyFiberIsNamed) {
  auto C = poset(2, {{0, 1}}, {"x", "y"});
  auto F = functor_on_objects(point_category(), C, {0});
  auto r = is_resolution<Fp>(F);
  EXPECT_FALSE(r.ok);
  EXPECT_TRUE(mentions(r.reasons, "empty fiber over y"));
}

TEST(Push, DisconnectedFiberIsNamed) {
  auto F = functor_on_objects(discrete_category(2), point_category(), {0, 0});
  auto r = is_resolution<Fp>(F);
  EXPECT_FALSE(r.ok);
  EXPECT_TRUE(mentions(r.reasons, "fiber over * is disconnected"));
}

TEST(Push, PointOverPointBarIsTheValue) {
  auto pt = point_category();
  auto E = constant_opfib<Fp>(pt);
  auto A = embed_section(E, constant_section(E, split_twist<Fp>()), replacement(pt, 0));
  auto bar = bar_pushforward(identity_functor(pt), E, A, Chain{0, {}});
  EXPECT_EQ(bar.comma.obj.size(), 1u);
  EXPECT_EQ(homology(*bar.bar.R.cx), homology(*split_twist<Fp>()));
}

TEST(Push, BarLevelZeroCountsSliceObjects) {
  for (bool tw : {false, true}) {
    Collapse<Fp> c(tw);
    for (int y = 0; y < 2; ++y) {
      auto bar = bar_pushforward(c.X.F, c.E, c.B, Chain{y, {}});
      EXPECT_EQ(bar.comma.obj.size(), slice_size(c.X.F, y));
      EXPECT_EQ(bar.bar.chains[0].size(), slice_size(c.X.F, y));
      EXPECT_TRUE(check_nsimp(bar.bar.X).empty());
    }
  }
}

TEST(Push, ShortReplacementIsRefused) {
  Collapse<Fp> c(false);
  auto short_B = pullback_presection(c.X.F, c.A, replacement(c.X.D, 1));
  try {
    bar_pushforward(c.X.F, c.E, short_B, Chain{1, {}});
    FAIL() << "expected a refusal";
  } catch (const std::invalid_argument& e) {
    EXPECT_EQ(std::string(e.what()).rfind("insufficient length bound", 0), 0u);
  }
}

TEST(Push, ArityTwoIsNotPushable) {
  auto E = mtensor_opfib<Fp>(finstar(2));
  EXPECT_THROW(require_pushable(E), std::invalid_argument);
}

template <class K>
class PushTest : public ::testing::Test {};
using Fields = ::testing::Types<Fp, Q>;
TYPED_TEST_SUITE(PushTest, Fields, FieldName);

TYPED_TEST(PushTest, PushforwardAlongIdentityIsQuasiIsoToValue) {
  using K = TypeParam;
  Collapse<K> c(true);
  auto idC = identity_functor(c.X.C);
  auto P = pushforward(idC, c.E, c.A, c.RC);
  EXPECT_TRUE(check_presection(P.result).empty());
  for (std::size_t s = 0; s < c.RC->objs.size(); ++s) {
    auto U = counit_correspondence(idC, c.A, c.RC->objs[s], P.bars[s]);
    EXPECT_TRUE(is_quasi_iso(U.left));
    EXPECT_TRUE(is_quasi_iso(U.right));
    EXPECT_EQ(homology(*P.bars[s].bar.R.cx), homology(*word_cx(c.A.val[s][0])->cx));
  }
}

TYPED_TEST(PushTest, CollapsePushforwardIsDerived) {
  using K = TypeParam;
  for (bool tw : {false, true}) {
    Collapse<K> c(tw);
    auto P = pushforward(c.X.F, c.E, c.B, c.RC);
    EXPECT_TRUE(check_presection(P.result).empty());
    EXPECT_TRUE(is_derived_section(P.result).ok);
  }
}

TYPED_TEST(PushTest, CounitLegsOnCollapse) {
  using K = TypeParam;
  for (bool tw : {false, true}) {
    Collapse<K> c(tw);
    for (auto& y : c.RC->objs) {
      auto bar = bar_pushforward(c.X.F, c.E, c.B, y);
      auto U = counit_correspondence(c.X.F, c.A, y, bar);
      EXPECT_TRUE(is_chain_map(U.left) && is_quasi_iso(U.left));
      EXPECT_TRUE(is_chain_map(U.right) && is_quasi_iso(U.right));
      EXPECT_TRUE(maps_equal(U.right, compose(U.collapse, U.mid)));
    }
  }
}

TYPED_TEST(PushTest, UnitCompositeOnCollapse) {
  using K = TypeParam;
  Collapse<K> c(false);
  for (auto& d : c.RD->objs) {
    auto U = unit_correspondence(c.X.F, c.E, c.B, d);
    EXPECT_TRUE(is_quasi_iso(U.q.right));
    EXPECT_TRUE(is_quasi_iso(U.composite));
  }
}

TYPED_TEST(PushTest, TriangleHoldsAndCorruptionIsCaught) {
  using K = TypeParam;
  Collapse<K> c(true);
  for (auto& d : c.RD->objs) EXPECT_TRUE(triangle_check(c.X.F, c.A, c.RD, d).ok());
  EXPECT_FALSE(triangle_check(c.X.F, c.A, c.RD, Chain{0, {}}, true).ok());
}

TYPED_TEST(PushTest, SpecialityOnAcyclicFibers) {
  using K = TypeParam;
  Collapse<K> c(false);
  std::vector<std::string> names;
  auto inst = fiber_instances(c.X.F, c.B, &names);
  ASSERT_EQ(inst.size(), 2u);
  EXPECT_EQ(names[0], "fiber x");
  for (std::size_t i = 0; i < inst.size(); ++i)
    for (auto& r : special_check(inst[i], names[i])) EXPECT_TRUE(r.ok) << r.object;
}

TYPED_TEST(PushTest, TwoPointsAreNotSpecial) {
  using K = TypeParam;
  auto disc = discrete_category(2);
  auto E = constant_opfib<K>(disc);
  auto A = embed_section(E, constant_section(E, ground<K>()), replacement(disc, 0));
  auto rows = special_check(A, "X");
  ASSERT_EQ(rows.size(), 2u);
  for (auto& r : rows) EXPECT_FALSE(r.ok);
}

TEST(Push, TransitionStructuresAreAdjunctionsOverTheBase) {
  auto X = collapse_fixture();
  for (int c = 0; c < 2; ++c) EXPECT_TRUE(check_transition_structure(transition_fiber(X.F, c)).empty());
  for (int d = 0; d < 3; ++d) {
    auto T = transition_slice(X.F, d);
    EXPECT_TRUE(check_transition_structure(T).empty());
    EXPECT_TRUE(check_transition_structure(transition_induced(T)).empty());
  }
}

TEST(Push, BrokenTransitionStructureIsReported) {
  auto X = collapse_fixture();
  auto T = transition_fiber(X.F, 0);
  T.c = 1;
  EXPECT_FALSE(check_transition_structure(T).empty());
}

TYPED_TEST(PushTest, TransitionSpansOnCollapse) {
  using K = TypeParam;
  for (bool tw : {false, true}) {
    Collapse<K> c(tw);
    for (int x = 0; x < 2; ++x) {
      auto T = transition_fiber(c.X.F, x);
      for (auto& ch : c.RC->objs)
        if (ch.start == x) {
          auto sp = transition_span(T, c.E, c.B, ch);
          EXPECT_TRUE(sp.left_qi && sp.right_qi) << chain_name(*c.X.C, ch);
        }
    }
    for (int d = 0; d < 3; ++d) {
      auto sp = transition_span(transition_slice(c.X.F, d), c.E, c.B, Chain{c.X.F.obj[d], {}});
      EXPECT_TRUE(sp.left_qi && sp.right_qi);
      auto cr = corr_ts(c.X.F, c.E, c.B, Chain{d, {}});
      EXPECT_TRUE(cr.left_qi);
      EXPECT_TRUE(cr.agree());
    }
  }
}

TEST(Push, SimplicialCommaOverAnObject) {
  auto X = collapse_fixture();
  auto pt = point_category();
  for (int x = 0; x < 2; ++x) {
    auto G = constant_functor(pt, X.C, x);
    auto S = simplicial_comma(X.F, G, 2, 0);
    std::size_t expect = 0;
    for (auto& level : reduced_chains(*X.D, 2))
      for (auto& d : level) expect += X.C->hom(X.F.obj[tail(*X.D, d)], x).size();
    EXPECT_EQ(S.objs.size(), expect);
    EXPECT_TRUE(check_comma_transformations(X.F, G, S).empty());
  }
  auto idp = identity_functor(pt);
  EXPECT_EQ(simplicial_comma(idp, constant_functor(pt, pt, 0), 3, 0).objs.size(), 1u);
}

TYPED_TEST(PushTest, FullyFaithfulDriverOnCollapse) {
  using K = TypeParam;
  for (bool tw : {false, true}) {
    Collapse<K> c(tw);
    for (auto& A : {c.A, pad_presection(c.A, acyclic_cone<K>())}) {
      auto cert = verify_theorem_ff(c.X.F, A, 3);
      EXPECT_EQ(cert.driver, "ff");
      EXPECT_TRUE(cert.ok);
      EXPECT_FALSE(cert.rows.empty());
    }
  }
}

TYPED_TEST(PushTest, EssentialImageDriverOnCollapse) {
  using K = TypeParam;
  for (bool tw : {false, true}) {
    Collapse<K> c(tw);
    auto ED = pullback(c.X.F, c.E);
    auto indep = embed_section(ED, collapse_independent_section(c.X, ED), c.RD);
    EXPECT_TRUE(verify_theorem_es(c.X.F, c.E, c.B, 3).ok);
    EXPECT_TRUE(verify_theorem_es(c.X.F, c.E, indep, 3).ok);
    auto broken = embed_section(ED, collapse_independent_section(c.X, ED, true), c.RD);
    auto cert = verify_theorem_es(c.X.F, c.E, broken, 3);
    EXPECT_FALSE(cert.ok);
    EXPECT_TRUE(mentions(cert.notes, "fiber morphism (p0→p1)"));
  }
}

TEST(Push, DriversRefuseNonResolutions) {
  auto C = poset(2, {{0, 1}}, {"x", "y"});
  auto F = functor_on_objects(point_category(), C, {0});
  auto E = constant_opfib<Fp>(C);
  auto A = embed_section(E, pushed_ground_section(E, 0), replacement(C, 1));
  try {
    verify_theorem_ff(F, A, 2);
    FAIL() << "expected DriverRefused";
  } catch (const DriverRefused& e) {
    std::string m = e.what();
    EXPECT_EQ(m.rfind("not a resolution:", 0), 0u);
    EXPECT_NE(m.find("empty fiber over y"), std::string::npos);
  }
}

TEST(Push, SuiteHelpersPass) {
  SuiteResult r{"push"};
  ff_checks<Fp>(r, 2);
  es_checks<Fp>(r, 2);
  transition_checks<Fp>(r);
  EXPECT_TRUE(r.ok()) << (r.messages.empty() ? "" : r.messages[0]);
  EXPECT_GT(r.checks, 0);
}

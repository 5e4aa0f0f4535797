#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "dsec/scenario.hpp"

#ifndef DSEC_EXAMPLES_DIR
#define DSEC_EXAMPLES_DIR "examples"
#endif
#ifndef DSEC_TEST_DATA_DIR
#define DSEC_TEST_DATA_DIR "tests/data"
#endif

using namespace dsec;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  return json::parse(in);
}

// message of the ScenarioError thrown while loading (and running) j, or ""
template <class K>
std::string load_error(const json& j) {
  try {
    auto S = load_scenario<K>(j, 3);
    run_scenario(S, 3);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

json collapse_json() {
  return json::parse(R"({
    "categories": {
      "D": {"objects": ["p0", "p1", "q"], "less": [["p0", "p1"], ["p1", "q"]]},
      "C": {"objects": ["x", "y"], "less": [["x", "y"]]}
    },
    "functors": {"F": {"source": "D", "target": "C", "objects": {"p0": "x", "p1": "x", "q": "y"}}},
    "opfibrations": {"E": {"kind": "chain", "base": "C", "transitions": "constant"}},
    "sections": {"S": {"opfibration": "E", "pushed": "x"}},
    "presections": {"A": {"embed": "S"}},
    "driver": {"driver": "ff", "resolution": "F", "presections": ["A"]}
  })");
}

}  // namespace

TEST(Scenario, FieldPrecedence) {
  EXPECT_FALSE(scenario_field(json::object()).has_value());
  EXPECT_EQ(scenario_field(json{{"field", "q"}}).value(), "q");
  EXPECT_EQ(scenario_field(json{{"field", "q"}, {"driver", {{"field", "fp:7"}}}}).value(), "fp:7");
}

TEST(Scenario, CollapseFfRunsAndPasses) {
  auto S = load_scenario<Fp>(collapse_json(), 3);
  EXPECT_EQ(S.cats.at("D")->nobj(), 3);
  auto runs = run_scenario(S, 3);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_EQ(runs[0].label, "A");
  EXPECT_EQ(runs[0].cert.driver, "ff");
  EXPECT_TRUE(runs[0].cert.ok);
}

TEST(Scenario, BadBoundaryNamesComplexAndDegree) {
  auto j = collapse_json();
  j["complexes"]["bad"] = json::parse(R"({"lo": 0, "dims": [1, 1, 1], "d": {"1": [1], "2": [1]}})");
  EXPECT_EQ(load_error<Fp>(j), "/complexes/bad: d∘d ≠ 0 at degree 2");
}

TEST(Scenario, DanglingReferencesAreLocated) {
  auto j = collapse_json();
  j["functors"]["F"]["target"] = "Z";
  EXPECT_EQ(load_error<Fp>(j), "/functors/F/target: unknown category 'Z'");
  j = collapse_json();
  j["driver"]["presections"] = {"missing"};
  EXPECT_EQ(load_error<Fp>(j).rfind("/driver/presections: unknown presection 'missing'", 0), 0u);
  j = collapse_json();
  j["driver"]["driver"] = "xyz";
  EXPECT_NE(load_error<Fp>(j).find("unknown driver 'xyz'"), std::string::npos);
  j = collapse_json();
  j.erase("driver");
  EXPECT_EQ(load_error<Fp>(j), "/: missing field 'driver'");
}

TEST(Scenario, NonFunctorIsRejected) {
  // p0 < p1 sent to y > x is not order preserving
  auto j = collapse_json();
  j["functors"]["F"]["objects"] = {{"p0", "y"}, {"p1", "x"}, {"q", "y"}};
  auto msg = load_error<Fp>(j);
  EXPECT_EQ(msg.rfind("/functors/F", 0), 0u);
}

TEST(Scenario, NonResolutionIsRefused) {
  auto j = collapse_json();
  j["functors"]["F"]["objects"] = {{"p0", "x"}, {"p1", "x"}, {"q", "x"}};
  auto S = load_scenario<Fp>(j, 3);
  EXPECT_THROW(run_scenario(S, 3), std::invalid_argument);
}

TEST(Scenario, ExplicitTableCategory) {
  // Z/2 as a one-object table, identities implicit
  auto j = json::parse(R"({
    "categories": {"G": {"objects": ["*"], "morphisms": [{"id": "g", "src": "*", "tgt": "*"}],
                         "compose": [["g", "g", "id_*"]]}},
    "driver": {"driver": "props"}
  })");
  auto S = load_scenario<Q>(j, 2);
  const auto& G = *S.cats.at("G");
  EXPECT_EQ(G.nmor(), 2);
  EXPECT_FALSE(is_direct(G));
  j["categories"]["G"]["compose"] = json::array();
  EXPECT_NE(load_error<Q>(j), "");
}

TEST(Scenario, CatKindOpfibration) {
  auto j = json::parse(R"({
    "categories": {
      "C": {"objects": ["x", "y"], "less": [["x", "y"]]},
      "P": {"objects": ["a", "b"], "less": [["a", "b"]]},
      "pt": {"objects": ["u"]}
    },
    "functors": {"to_b": {"source": "pt", "target": "P", "objects": {"u": "b"}}},
    "opfibrations": {"E": {"kind": "cat", "base": "C", "fibers": {"x": "pt", "y": "P"}, "transitions": {"x<y": "to_b"}}},
    "driver": {"driver": "props"}
  })");
  auto S = load_scenario<Fp>(j, 2);
  ASSERT_EQ(S.families.count("E"), 1u);
  auto runs = run_scenario(S, 2);
  ASSERT_EQ(runs.size(), 1u);
  EXPECT_TRUE(runs[0].cert.ok);
  j["opfibrations"]["E"]["transitions"] = json::object();
  EXPECT_EQ(load_error<Fp>(j), "/opfibrations/E/transitions: no transition along 'x<y'");
}

TEST(Scenario, PresectionNeedsLongEnoughReplacement) {
  auto j = collapse_json();
  j["presections"]["A"]["length"] = 0;
  auto msg = load_error<Fp>(j);
  EXPECT_NE(msg.find("insufficient length bound"), std::string::npos) << msg;
}

TEST(Scenario, ExamplesPass) {
  int seen = 0;
  for (auto& e : std::filesystem::directory_iterator(DSEC_EXAMPLES_DIR)) {
    if (e.path().extension() != ".json") continue;
    ++seen;
    auto j = read_json(e.path().string());
    auto f = scenario_field(j).value_or("fp:32003");
    std::vector<RunResult> runs;
    if (f == "q") {
      auto S = load_scenario<Q>(j, 3);
      runs = run_scenario(S, 3);
    } else {
      auto S = load_scenario<Fp>(j, 3);
      runs = run_scenario(S, 3);
    }
    EXPECT_FALSE(runs.empty()) << e.path();
    for (auto& r : runs) EXPECT_TRUE(r.cert.ok) << e.path() << " " << r.label;
  }
  EXPECT_GE(seen, 3);
}

TEST(Scenario, NotLocallyConstantFailsWithNotes) {
  auto j = read_json(DSEC_TEST_DATA_DIR "/not-locally-constant.json");
  auto S = load_scenario<Fp>(j, 3);
  auto runs = run_scenario(S, 3);
  bool any_fail = false;
  for (auto& r : runs) any_fail = any_fail || !r.cert.ok;
  EXPECT_TRUE(any_fail);
}

TEST(Scenario, ReportIsStable) {
  auto S = load_scenario<Fp>(collapse_json(), 2);
  auto a = render_report("x.json", S.field, run_scenario(S, 2));
  auto b = render_report("x.json", S.field, run_scenario(S, 2));
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("counit-left"), std::string::npos);
}

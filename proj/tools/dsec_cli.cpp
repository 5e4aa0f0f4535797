// dsec: run scenario files and property suites.
//   dsec run <scenario.json> [--field q|fp:<p>] [--max-len n] [--report path]
//   dsec props [--suite name] [--seed n] [--count n] [--exhaustive] [--field ...] [--report path]
// Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 invalid input.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dsec/scenario.hpp"
#include "dsec/suites.hpp"

namespace {

using namespace dsec;

constexpr int kPass = 0, kFail = 1, kInvalid = 2;

struct Input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class FieldKind { Rational, Prime };

FieldKind parse_field(const std::string& s) {
  if (s == "q") return FieldKind::Rational;
  if (s.rfind("fp:", 0) == 0) {
    unsigned long p = 0;
    try {
      std::size_t used = 0;
      p = std::stoul(s.substr(3), &used);
      if (used != s.size() - 3) throw std::invalid_argument("");
    } catch (const std::logic_error&) {
      throw Input("bad field '" + s + "': expected q or fp:<prime>");
    }
    if (p > 46340) throw Input("bad field '" + s + "': prime must be below 46341");
    try {
      Fp::set_modulus(std::uint32_t(p));
    } catch (const std::invalid_argument& e) {
      throw Input("bad field '" + s + "': " + e.what());
    }
    return FieldKind::Prime;
  }
  throw Input("bad field '" + s + "': expected q or fp:<prime>");
}

int emit(const std::string& report, const std::string& path, const std::string& summary) {
  if (path.empty()) {
    std::cout << report;
    return 0;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write report to " << path << "\n";
    return kInvalid;
  }
  out << report;
  std::cout << summary << "\n";
  return 0;
}

template <class K>
int run_file(const json& j, const std::string& source, int max_len, const std::string& report_path) {
  auto S = load_scenario<K>(j, max_len);
  if (S.driver.contains("max_len")) max_len = detail::need_int(S.driver["max_len"], "/driver/max_len");
  auto runs = run_scenario(S, max_len);
  bool ok = true;
  for (auto& r : runs) ok = ok && r.cert.ok;
  auto summary = source + ": " + (ok ? "pass" : "FAIL") + " (" + std::to_string(runs.size()) + " certificates)";
  if (int e = emit(render_report(source, S.field, runs), report_path, summary)) return e;
  return ok ? kPass : kFail;
}

int cmd_run(const std::string& path, std::optional<std::string> field, std::optional<int> max_len, const std::string& report) {
  std::ifstream in(path);
  if (!in) throw Input("cannot read scenario file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Input(path + ": " + e.what());
  }
  // explicit flag > scenario > default
  std::string f = field ? *field : scenario_field(j).value_or("fp:32003");
  int L = max_len.value_or(3);
  if (max_len && j.contains("driver") && j["driver"].is_object()) j["driver"].erase("max_len");
  if (L < 0) throw Input("--max-len must be nonnegative");
  if (parse_field(f) == FieldKind::Rational) return run_file<Q>(j, path, L, report);
  return run_file<Fp>(j, path, L, report);
}

template <class K>
int run_suites(const std::string& only, const SuiteOptions& o, const std::string& report_path) {
  auto reg = suite_registry<K>();
  if (!only.empty()) {
    bool known = false;
    std::string names;
    for (auto& [n, f] : reg) {
      known = known || n == only;
      names += (names.empty() ? "" : ", ") + n;
    }
    if (!known) throw Input("unknown suite '" + only + "' (known: " + names + ")");
  }
  std::ostringstream os;
  json block = {{"field", FieldTraits<K>::name()}, {"seed", o.seed}, {"suites", json::array()}};
  bool ok = true;
  int ran = 0;
  for (auto& [n, f] : reg) {
    if (!only.empty() && n != only) continue;
    auto r = f(o);
    ok = ok && r.ok();
    ++ran;
    os << summary_line(r) << "\n";
    for (auto& m : r.messages) os << "  " << m << "\n";
    block["suites"].push_back(
        {{"name", r.name}, {"checks", r.checks}, {"failures", r.failures}, {"counts", r.counts}, {"messages", r.messages}});
  }
  block["ok"] = ok;
  std::ostringstream head;
  head << "props field " << FieldTraits<K>::name() << "  seed " << o.seed << "\n";
  auto report = head.str() + os.str() + "\n--- certificate ---\n" + block.dump(2) + "\n";
  auto summary = std::string("props: ") + (ok ? "pass" : "FAIL") + " (" + std::to_string(ran) + " suites)";
  if (int e = emit(report, report_path, summary)) return e;
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dsec: derived sections and pushforwards over finite categories"};
  app.require_subcommand(1);

  std::string scenario, report, suite, field_flag;
  int max_len = 3, count = 0;
  std::uint64_t seed = 1;
  bool exhaustive = false;

  auto* run = app.add_subcommand("run", "run the driver of a scenario file");
  run->add_option("scenario", scenario, "scenario JSON file")->required();
  auto* run_field = run->add_option("--field", field_flag, "q or fp:<prime> (default: scenario, else fp:32003)");
  auto* run_len = run->add_option("--max-len", max_len, "length bound for verified components");
  run->add_option("--report", report, "write the report here instead of stdout");

  auto* props = app.add_subcommand("props", "run the property suites");
  props->add_option("--suite", suite, "run one suite only");
  props->add_option("--seed", seed, "random seed");
  props->add_option("--count", count, "instances per randomized check (0: suite default)");
  props->add_flag("--exhaustive", exhaustive, "enlarge enumerated families");
  auto* props_field = props->add_option("--field", field_flag, "q or fp:<prime> (default fp:32003)");
  props->add_option("--max-len", max_len, "length bound for driver checks");
  props->add_option("--report", report, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalid;
  }

  try {
    if (run->parsed()) {
      std::optional<std::string> f;
      if (run_field->count()) f = field_flag;
      std::optional<int> L;
      if (run_len->count()) L = max_len;
      return cmd_run(scenario, f, L, report);
    }
    if (max_len < 0) throw Input("--max-len must be nonnegative");
    if (count < 0) throw Input("--count must be nonnegative");
    SuiteOptions o;
    o.seed = seed;
    o.count = count;
    o.exhaustive = exhaustive;
    o.max_len = max_len;
    std::string f = props_field->count() ? field_flag : "fp:32003";
    if (parse_field(f) == FieldKind::Rational) return run_suites<Q>(suite, o, report);
    return run_suites<Fp>(suite, o, report);
  } catch (const std::invalid_argument& e) {  // Input, ScenarioError, DriverRefused
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
}

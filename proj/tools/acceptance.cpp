// Acceptance run: one line per criterion, PASS only when every check holds
// within the time limit. Exit 0 iff all criteria pass.

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "dsec/suites.hpp"

#ifndef DSEC_CLI_PATH
#define DSEC_CLI_PATH "dsec"
#endif
#ifndef DSEC_EXAMPLES_DIR
#define DSEC_EXAMPLES_DIR "examples"
#endif

namespace {

using namespace dsec;

struct Criterion {
  int id;
  std::string title;
  double limit;
  std::function<SuiteResult()> body;
};

// stdout of a command plus its exit status
std::pair<std::string, int> capture(const std::string& cmd) {
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {"", -1};
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  int st = pclose(p);
  return {out, WIFEXITED(st) ? WEXITSTATUS(st) : -1};
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

SuiteResult cli_runs() {
  SuiteResult r{"cli"};
  std::vector<std::string> files;
  for (auto& e : std::filesystem::directory_iterator(DSEC_EXAMPLES_DIR))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  r.check(!files.empty(), "no scenario files found in " DSEC_EXAMPLES_DIR);
  std::vector<std::string> cmds;
  for (auto& f : files) cmds.push_back(shell_quote(DSEC_CLI_PATH) + " run " + shell_quote(f));
  cmds.push_back(shell_quote(DSEC_CLI_PATH) + " props");
  for (auto& c : cmds) {
    auto [a, ea] = capture(c + " 2>&1");
    auto [b, eb] = capture(c + " 2>&1");
    r.check(ea == 0 && eb == 0, c + " exited " + std::to_string(ea));
    r.check(a == b && !a.empty(), c + " is not byte-identical across runs");
  }
  r.counts["commands"] = long(cmds.size());
  return r;
}

std::vector<Criterion> criteria() {
  return {
      {1, "d∘d = 0 on random complexes, is_quasi_iso vs homology oracle (Fp and Q)", 5,
       [] {
         SuiteResult r{"c1"};
         Rng a(101), b(102);
         chain_random_checks<Fp>(r, a, 200, 100, 30);
         chain_random_checks<Q>(r, b, 200, 100, 30);
         return r;
       }},
      {2, "Alexander-Whitney counitality and coassociativity, n <= 4 (Fp and Q)", 1,
       [] {
         SuiteResult r{"c2"};
         aw_checks<Fp>(r, 4);
         aw_checks<Q>(r, 4);
         return r;
       }},
      {3, "split-augmented: composite is the identity, both maps quasi-isos (50, levels <= 4)", 10,
       [] {
         SuiteResult r{"c3"};
         Rng rng(103);
         split_checks<Fp>(r, rng, 50, 4);
         return r;
       }},
      {4, "bisimplicial: orders 12, 21 and diagonal pairwise quasi-isomorphic (30, levels <= 3)", 30,
       [] {
         SuiteResult r{"c4"};
         Rng rng(104);
         bisimplicial_checks<Fp>(r, rng, 30, 3);
         return r;
       }},
      {5, "unique factorization, direct categories <= 4 objects, <= 6 arrows, chains <= 3", 10,
       [] {
         SuiteOptions o;
         o.exhaustive = true;
         return suite_factorization(o);
       }},
      {6, "X(1) -> |ΠX| quasi-iso on posets with terminal object, pushout poset", 10,
       [] {
         SuiteResult r{"c6"};
         Rng rng(106);
         terminal_object_checks<Fp>(r, rng, 20);
         pushout_checks<Fp>(r, rng);
         return r;
       }},
      {7, "embedded sections derived with identity anchors (FinStar(<=2) k[t]/t², twist)", 5,
       [] {
         SuiteResult r{"c7"};
         embed_checks<Fp>(r);
         embed_checks<Q>(r);
         return r;
       }},
      {8, "counit legs quasi-iso at reduced chains of length <= 3, triangle exact", 60,
       [] {
         SuiteResult r{"c8"};
         ff_checks<Fp>(r, 3);
         ff_checks<Q>(r, 3);
         return r;
       }},
      {9, "unit composite quasi-iso, F_!B derived, speciality; non-lc B pinpointed", 60,
       [] {
         SuiteResult r{"c9"};
         es_checks<Fp>(r, 3);
         es_checks<Q>(r, 3);
         return r;
       }},
      {10, "transition spans quasi-iso for fiber, slice and induced structures, CorrTS iff", 30,
       [] {
         SuiteResult r{"c10"};
         transition_checks<Fp>(r);
         transition_checks<Q>(r);
         return r;
       }},
      {11, "CLI scenarios exit 0 and reruns are byte-identical", 120, cli_runs},
  };
}

}  // namespace

int main() {
  bool all = true;
  for (auto& c : criteria()) {
    auto t = timed([&] {
      auto r = c.body();
      std::string detail = std::to_string(r.checks - r.failures) + "/" + std::to_string(r.checks) + " checks";
      for (auto& m : r.messages) detail += "; " + m;
      return std::pair<bool, std::string>{r.ok(), detail};
    });
    bool ok = t.ok && t.seconds < c.limit;
    all = all && ok;
    std::ostringstream os;
    os << "criterion " << std::setw(2) << c.id << ": " << (ok ? "PASS" : "FAIL") << "  " << std::fixed << std::setprecision(2)
       << t.seconds << "s (limit " << std::setprecision(0) << c.limit << "s)  " << c.title << "  [" << t.detail << "]";
    if (t.ok && t.seconds >= c.limit) os << "  time limit exceeded";
    std::cout << os.str() << std::endl;
  }
  std::cout << (all ? "acceptance: all criteria pass" : "acceptance: FAILED") << std::endl;
  return all ? 0 : 1;
}

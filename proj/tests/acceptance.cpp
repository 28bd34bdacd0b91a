// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "kr/aut.hpp"
#include "kr/commands.hpp"
#include "kr/errors.hpp"
#include "term_gen.hpp"

using namespace kr;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kMorseBudgetSeconds = 60.0;
constexpr double kOracleBudgetSeconds = 10.0;
constexpr std::uint64_t kIsoCap = 5000;
constexpr std::uint64_t kFullAutCap = 10000;
constexpr std::uint64_t kNodeLimit = 1'000'000;
constexpr int kMinCorpus = 20;
constexpr int kRandomTerms = 50;
constexpr std::uint64_t kRandomTermMaxOrder = 2000;
constexpr int kRandomFields = 10;
constexpr int kValuesPerField = 20;
constexpr int kFieldSize = 16;
constexpr std::uint64_t kTermSeed = 20240611;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;
void report(int id, bool pass, const std::string& title, const std::string& detail) {
  std::printf("%s %d %s: %s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

struct Member {
  std::string name;
  RealizePlan plan;
  GroupTerm term;
  ConstructionRecord rec;
  ReebGraph graph;
  std::string error;
};

std::vector<Member> build_corpus() {
  std::vector<Member> out;
  for (const auto& cm : corpus_members()) {
    Member m;
    m.name = cm.name;
    try {
      m.plan = plan_realization(cm.request);
      m.term = cm.request.n || cm.request.m
                   ? normalize(m.plan.kind == CaseKind::TreeLattice ? GroupTerm::wr2(m.plan.base, m.plan.n, m.plan.m)
                                                                    : GroupTerm::wr(m.plan.base, m.plan.n))
                   : normalize(parse_term(cm.request.term));
      auto built = run_plan(m.plan);
      // Work from the serialized forms, as `kr verify` does.
      m.rec = record_from_json(nlohmann::json::parse(record_to_json(built).dump()));
      m.rec.field = load_field(save_field(built.field));
      m.graph = build_reeb(m.rec.field);
    } catch (const std::exception& e) {
      m.error = e.what();
    }
    out.push_back(std::move(m));
  }
  return out;
}

bool is_tree_case(const Member& m) { return m.plan.kind == CaseKind::TreeLattice; }

std::vector<GraphAut> induced(const Member& m) {
  std::vector<GraphAut> gens;
  for (const auto& s : m.rec.expected_symmetries) gens.push_back(induced_graph_aut(m.rec, m.graph, s));
  return gens;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion_morse(const std::vector<Member>& corpus, double build_seconds) {
  int bad = 0;
  std::set<std::uint64_t> circuit_n, simple_n;
  std::set<std::pair<std::uint64_t, std::uint64_t>> tree_nm;
  for (const auto& m : corpus) {
    if (!m.error.empty()) {
      ++bad;
      continue;
    }
    auto c = morse_counts(m.rec.field);
    if (c.c0 - c.c1 + c.c2 != 0 || !(c == m.rec.counts)) ++bad;
    if (is_tree_case(m)) tree_nm.insert({m.plan.n, m.plan.m});
    else (m.plan.simple ? simple_n : circuit_n).insert(m.plan.n);
  }
  bool span = circuit_n == std::set<std::uint64_t>{1, 2, 3, 4} && simple_n == std::set<std::uint64_t>{1, 2, 3} &&
              tree_nm.size() == 4;
  bool pass = bad == 0 && span && static_cast<int>(corpus.size()) >= kMinCorpus && build_seconds <= kMorseBudgetSeconds;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu fields, %d violations, parameter grid %s, %.1f s (budget %.0f s)", corpus.size(),
                bad, span ? "covered" : "INCOMPLETE", build_seconds, kMorseBudgetSeconds);
  report(1, pass, "Morse equality", buf);
}

void criterion_shape(const std::vector<Member>& corpus) {
  int bad = 0;
  for (const auto& m : corpus) {
    try {
      if (!m.error.empty()) throw std::runtime_error(m.error);
      auto s = classify_shape(m.graph);
      if (s.betti1 > 1 || s.circuit == is_tree_case(m)) ++bad;
    } catch (const std::exception&) {
      ++bad;
    }
  }
  report(2, bad == 0, "Shape dichotomy", std::to_string(corpus.size() - bad) + "/" + std::to_string(corpus.size()) +
                                              " fields have the expected shape");
}

void criterion_round_trip(const std::vector<Member>& corpus) {
  int bad = 0, checked = 0;
  std::map<std::string, std::uint64_t> orders;
  for (const auto& m : corpus) {
    try {
      if (!m.error.empty()) throw std::runtime_error(m.error);
      if (order(m.term) > kIsoCap) continue;
      ++checked;
      auto pg = generated_group(m.graph, induced(m), kIsoCap);
      auto st = structural_group(m.rec);
      bool ok = is_isomorphic(pg, perm_rep(m.term), kIsoCap) == IsoResult::Isomorphic &&
                is_isomorphic(pg, perm_rep(st), kIsoCap) == IsoResult::Isomorphic;
      if (!ok) ++bad;
      orders[m.name] = pg.order.value_or(0);
    } catch (const std::exception&) {
      ++bad;
    }
  }
  // Named instances: Z4, Z2 x Z2 and Z2 wr Z3.
  struct Instance {
    std::string member, term;
    std::uint64_t order;
  };
  int named = 0;
  for (const auto& inst : {Instance{"circuit:1:n4", "wr(1,4)", 4}, Instance{"tree:1:n2:m1", "wr2(1,2,1)", 4},
                           Instance{"circuit:wr(1,2):n3", "wr(wr(1,2),3)", 24}}) {
    for (const auto& m : corpus)
      if (m.name == inst.member && m.error.empty() && orders.count(m.name) && orders[m.name] == inst.order &&
          m.term == normalize(parse_term(inst.term)))
        ++named;
  }
  report(3, bad == 0 && named == 3 && checked == static_cast<int>(corpus.size()), "Group round-trip",
         std::to_string(checked - bad) + "/" + std::to_string(checked) + " isomorphic at order <= " +
             std::to_string(kIsoCap) + ", named instances Z4, Z2xZ2, Z2 wr Z3: " + std::to_string(named) + "/3");
}

void criterion_orders() {
  std::mt19937_64 rng(kTermSeed);
  int bad = 0;
  std::uint64_t largest = 0;
  for (int i = 0; i < kRandomTerms; ++i) {
    auto t = kr::testing::random_small_term(rng, kRandomTermMaxOrder);
    auto g = perm_rep(t);
    auto e = enumerate_elements(g, kRandomTermMaxOrder);
    auto o = static_cast<std::uint64_t>(order(t));
    largest = std::max(largest, o);
    if (!e || *e != o) ++bad;
  }
  report(4, bad == 0, "Order formulas",
         std::to_string(kRandomTerms - bad) + "/" + std::to_string(kRandomTerms) +
             " random terms enumerate to their formula order (largest " + std::to_string(largest) + ")");
}

void criterion_containment(const std::vector<Member>& corpus) {
  int bad = 0, checked = 0, skipped = 0;
  for (const auto& m : corpus) {
    try {
      if (!m.error.empty()) throw std::runtime_error(m.error);
      std::vector<GraphAut> all;
      try {
        all = all_value_preserving_auts(m.graph, {kFullAutCap, kNodeLimit});
      } catch (const ContractError& e) {
        if (e.code() != "Overflow") throw;
        ++skipped;
        continue;
      }
      ++checked;
      std::set<std::pair<Perm, Perm>> members;
      for (const auto& a : all) members.insert({a.vertex_perm, a.edge_perm});
      for (const auto& a : induced(m))
        if (!members.count({a.vertex_perm, a.edge_perm})) {
          ++bad;
          break;
        }
    } catch (const std::exception&) {
      ++bad;
    }
  }
  report(5, bad == 0 && checked > 0, "Containment",
         std::to_string(checked - bad) + "/" + std::to_string(checked) + " realized groups embed; " +
             std::to_string(skipped) + " members skipped with full group above " + std::to_string(kFullAutCap));
}

void criterion_simplicity(const std::vector<Member>& corpus) {
  int simple_ok = 0, simple_total = 0, tree_ok = 0, tree_total = 0, errors = 0;
  for (const auto& m : corpus) {
    bool simple = m.plan.simple, tree = is_tree_case(m);
    if (!simple && !tree) continue;
    (simple ? simple_total : tree_total)++;
    try {
      if (!m.error.empty()) throw std::runtime_error(m.error);
      bool s = is_simple(m.rec.field, m.graph);
      if (simple && s && classify_shape(m.graph).circuit) ++simple_ok;
      if (tree && !s) ++tree_ok;
    } catch (const std::exception&) {
      ++errors;
    }
  }
  bool pass = errors == 0 && simple_ok == simple_total && tree_ok == tree_total && simple_total > 0 && tree_total > 0;
  report(6, pass, "Simplicity",
         std::to_string(simple_ok) + "/" + std::to_string(simple_total) + " simple outputs simple with a circuit, " +
             std::to_string(tree_ok) + "/" + std::to_string(tree_total) + " tree outputs not simple, " +
             std::to_string(errors) + " exceptions");
}

void criterion_oracle() {
  auto t0 = Clock::now();
  int mismatches = 0, values = 0, errors = 0;
  for (int k = 0; k < kRandomFields; ++k) {
    try {
      auto f = random_torus_field(static_cast<std::uint64_t>(k), kFieldSize);
      auto g = build_reeb(f);
      for (double t : random_regular_values(f, 0x9e3779b97f4a7c15ull ^ static_cast<std::uint64_t>(k), kValuesPerField)) {
        ++values;
        if (edges_spanning(g, t) != level_component_count(f, t)) ++mismatches;
      }
    } catch (const std::exception&) {
      ++errors;
    }
  }
  double secs = seconds_since(t0);
  bool pass = mismatches == 0 && errors == 0 && values == kRandomFields * kValuesPerField && secs <= kOracleBudgetSeconds;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%d fields x %d values, %d mismatches, %d errors, %.2f s (budget %.0f s)",
                kRandomFields, kValuesPerField, mismatches, errors, secs, kOracleBudgetSeconds);
  report(7, pass, "Reeb oracle", buf);
}

void criterion_special(const std::vector<Member>& corpus) {
  int ok = 0, total = 0;
  std::string first_error;
  for (const auto& m : corpus) {
    if (!is_tree_case(m)) continue;
    ++total;
    try {
      if (!m.error.empty()) throw std::runtime_error(m.error);
      auto v = find_special_vertex(m.graph, m.rec.field);
      auto comps = complement_components(m.graph, m.rec.field, v);
      bool disks = !comps.empty() && std::all_of(comps.begin(), comps.end(), [](const auto& c) { return c.euler == 1; });
      if (disks) ++ok;
    } catch (const std::exception& e) {
      if (first_error.empty()) first_error = m.name + ": " + e.what();
    }
  }
  report(8, ok == total && total > 0, "Special vertex",
         std::to_string(ok) + "/" + std::to_string(total) + " tree realizations have a unique special vertex" +
             (first_error.empty() ? "" : " (" + first_error + ")"));
}

void criterion_determinism() {
  auto base = fs::temp_directory_path() / ("kr_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  bool same = true;
  int exits[2] = {-1, -1};
  for (int run = 0; run < 2; ++run) exits[run] = cmd_corpus(0, (base / std::to_string(run)).string()).exit_code;
  for (const char* name : {"summary.json", "summary.tsv"}) {
    auto a = slurp(base / "0" / name), b = slurp(base / "1" / name);
    same = same && !a.empty() && a == b;
  }
  fs::remove_all(base);
  report(9, same && exits[0] == 0 && exits[1] == 0, "Determinism",
         std::string("two corpus runs with seed 0 ") + (same ? "byte-identical" : "DIFFER") + ", exit codes " +
             std::to_string(exits[0]) + "/" + std::to_string(exits[1]));
}

}  // namespace

int main() {
  auto t0 = Clock::now();
  auto corpus = build_corpus();
  double build_seconds = seconds_since(t0);
  for (const auto& m : corpus)
    if (!m.error.empty()) std::printf("  error in %s: %s\n", m.name.c_str(), m.error.c_str());

  criterion_morse(corpus, build_seconds);
  criterion_shape(corpus);
  criterion_round_trip(corpus);
  criterion_orders();
  criterion_containment(corpus);
  criterion_simplicity(corpus);
  criterion_oracle();
  criterion_special(corpus);
  criterion_determinism();
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}

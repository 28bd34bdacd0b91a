#include "kr/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "kr/aut.hpp"
#include "kr/errors.hpp"
#include "kr/reeb.hpp"

namespace kr {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("IoError", "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("IoError", "cannot write " + path.string());
  out << bytes;
}

json error_json(const std::string& code, const std::string& what) { return {{"code", code}, {"message", what}}; }

// Runs a command body and maps failures onto the exit-code contract.
CommandResult guarded(const std::string& command, const std::function<CommandResult()>& body,
                      const std::set<std::string>& input_codes = {}) {
  try {
    auto r = body();
    r.report["command"] = command;
    return r;
  } catch (const InputError& e) {
    return {2, {{"command", command}, {"ok", false}, {"error", error_json(e.code(), e.what())}}};
  } catch (const ContractError& e) {
    int code = e.code() == "InternalAssertion" ? 3 : input_codes.count(e.code()) ? 2 : 1;
    return {code, {{"command", command}, {"ok", false}, {"error", error_json(e.code(), e.what())}}};
  } catch (const std::exception& e) {
    return {3, {{"command", command}, {"ok", false}, {"error", error_json("Internal", e.what())}}};
  }
}

std::uint64_t checked_count(std::uint64_t v, const char* what) {
  if (v < 1) throw InputError("InvalidParameter", std::string(what) + " must be at least 1");
  return v;
}

GroupTerm requested_term(const RealizePlan& p) {
  switch (p.kind) {
    case CaseKind::TreeLattice: return normalize(GroupTerm::wr2(p.base, p.n, p.m));
    default: return normalize(GroupTerm::wr(p.base, p.n));
  }
}

const char* case_label(const RealizePlan& p) {
  if (p.simple) return "simple";
  return p.kind == CaseKind::TreeLattice ? "tree" : "circuit";
}

json counts_json(const MorseCounts& c) { return {{"c0", c.c0}, {"c1", c.c1}, {"c2", c.c2}}; }

}  // namespace

RealizePlan plan_realization(const RealizeRequest& req) {
  const GroupTerm t = parse_term(req.term);
  const GroupTerm nt = normalize(t);
  RealizePlan p;
  if (req.case_name == "circuit" || req.case_name == "simple") {
    p.kind = CaseKind::Circuit;
    p.simple = req.case_name == "simple";
    if (req.m) throw InputError("InvalidParameter", "--m only applies to the tree case");
    auto fits = [&](const GroupTerm& a) { return p.simple ? class_of(a).in_P2 : class_of(a).in_P; };
    const char* cls = p.simple ? "E2" : "E1";
    if (req.n) {
      p.base = t;
      p.n = checked_count(*req.n, "n");
      if (!fits(normalize(t))) throw InputError(std::string("NotIn") + cls, "base term is outside the required class");
    } else if (nt.kind == GroupTerm::Kind::WrC && fits(nt.base())) {
      p.base = nt.base();
      p.n = nt.n;
    } else if (fits(nt)) {
      p.base = nt;
      p.n = 1;
    } else {
      throw InputError(std::string("NotIn") + cls, format_term(nt) + " has no " + cls + " decomposition");
    }
  } else if (req.case_name == "tree") {
    p.kind = CaseKind::TreeLattice;
    if (req.n || req.m) {
      p.base = t;
      p.n = checked_count(req.n.value_or(1), "n");
      p.m = checked_count(req.m.value_or(1), "m");
      if (!class_of(normalize(t)).in_P) throw InputError("NotInE0", "base term is outside class P");
    } else if (nt.kind == GroupTerm::Kind::WrCC && class_of(nt.base()).in_P) {
      p.base = nt.base();
      p.n = nt.n;
      p.m = nt.m;
    } else {
      throw InputError("NotInE0", format_term(nt) + " is not of the form wr2(A,n,m) with A in P");
    }
  } else {
    throw InputError("InvalidParameter", "--case must be circuit, tree or simple");
  }
  return p;
}

ConstructionRecord run_plan(const RealizePlan& p) {
  if (p.kind == CaseKind::TreeLattice) return realize_torus_tree(p.base, p.n, p.m);
  return p.simple ? realize_simple(p.base, p.n) : realize_torus_circuit(p.base, p.n);
}

json analyze_field(const ScalarField& f) {
  const bool torus = f.kind() == DomainKind::Torus;
  auto counts = morse_counts(f);
  auto g = build_reeb(f);
  auto shape = classify_shape(g, torus);
  json out{{"kind", to_string(f.kind())},
           {"width", f.width()},
           {"height", f.height()},
           {"counts", counts_json(counts)},
           {"euler_check", euler_check(f)},
           {"betti1", shape.betti1},
           {"shape", shape.circuit ? "circuit" : "tree"},
           {"is_generic", is_generic(f)},
           {"is_simple", is_simple(f, g)},
           {"reeb", {{"vertices", g.vertices.size()}, {"edges", g.edges.size()}}}};
  out["special_vertex"] = nullptr;
  if (torus && !shape.circuit) {
    auto v = find_special_vertex(g, f);
    out["special_vertex"] = {{"id", v},
                             {"value", g.vertices[v].value},
                             {"critical_points", g.vertices[v].critical_points.size()},
                             {"complement_components", complement_components(g, f, v).size()}};
  }
  return out;
}

json verify_realization(const ConstructionRecord& rec, const GroupTerm& term, VerifyOptions opts) {
  json checks = json::array();
  bool ok = true;
  auto add = [&](const std::string& name, const std::function<json()>& fn) {
    json c{{"name", name}};
    try {
      json r = fn();
      c["status"] = r.value("status", "pass");
      if (r.contains("detail")) c["detail"] = r["detail"];
    } catch (const Error& e) {
      c["status"] = "fail";
      c["detail"] = e.what();
    }
    if (c["status"] == "fail") ok = false;
    checks.push_back(c);
    return c["status"] == "pass";
  };
  auto verdict = [](bool pass, json detail) { return json{{"status", pass ? "pass" : "fail"}, {"detail", detail}}; };
  const auto& f = rec.field;
  const GroupTerm want = normalize(term);

  add("euler", [&] { return verdict(euler_check(f), counts_json(morse_counts(f))); });
  add("record", [&] {
    check_record(rec);
    return json::object();
  });
  ReebGraph g;
  if (!add("reeb", [&] {
        g = build_reeb(f);
        return json{{"detail", {{"vertices", g.vertices.size()}, {"edges", g.edges.size()}}}};
      }))
    return {{"ok", false}, {"checks", checks}};

  add("shape", [&] {
    auto s = classify_shape(g, f.kind() == DomainKind::Torus);
    bool want_circuit = rec.kind == CaseKind::Circuit;
    return verdict(s.circuit == want_circuit, s.circuit ? "circuit" : "tree");
  });
  if (rec.kind == CaseKind::TreeLattice) {
    add("special_vertex", [&] {
      auto v = find_special_vertex(g, f);
      auto comps = complement_components(g, f, v);
      bool disks = std::all_of(comps.begin(), comps.end(), [](const auto& c) { return c.is_disk(); });
      return verdict(disks, {{"vertex", v}, {"value", g.vertices[v].value}, {"components", comps.size()}});
    });
    add("not_simple", [&] { return verdict(!is_simple(f, g), "tree realizations are never simple"); });
  }
  if (rec.simple_mode) add("simple", [&] { return verdict(is_simple(f, g), nullptr); });

  std::vector<GraphAut> gens;
  if (!add("induced_symmetries", [&] {
        for (const auto& s : rec.expected_symmetries) gens.push_back(induced_graph_aut(rec, g, s));
        return json{{"detail", gens.size()}};
      }))
    return {{"ok", false}, {"checks", checks}};

  GroupTerm st;
  add("structural_group", [&] {
    st = structural_group(rec);
    return json{{"detail", format_term(st)}};
  });

  // Abstract comparison of a permutation group with a term; skipped above cap.
  auto compare = [&](const PermGroup& pg, const GroupTerm& t) -> json {
    Order want_order = order(t);
    if (want_order > opts.cap) return {{"status", "skipped"}, {"detail", "order above cap"}};
    if (*pg.order != static_cast<std::uint64_t>(want_order))
      return verdict(false, "order " + std::to_string(*pg.order) + " vs " + order_to_string(want_order));
    auto iso = is_isomorphic(pg, perm_rep(t), opts.cap);
    if (iso == IsoResult::Undecided) return {{"status", "skipped"}, {"detail", "isomorphism search undecided"}};
    return verdict(iso == IsoResult::Isomorphic, "order " + std::to_string(*pg.order));
  };
  std::optional<PermGroup> pg;
  add("generated_group", [&] {
    PermGroup tmp{static_cast<std::uint32_t>(g.vertices.size() + g.edges.size()), {}, {}};
    for (const auto& a : gens) tmp.generators.push_back(to_point_perm(g, a));
    if (!enumerate_elements(tmp, opts.cap)) return json{{"status", "skipped"}, {"detail", "order above cap"}};
    pg = std::move(tmp);
    return json{{"detail", *pg->order}};
  });
  if (pg) {
    add("generated_vs_term", [&] { return compare(*pg, want); });
    add("generated_vs_structural", [&] { return compare(*pg, st); });
  }
  add("structural_vs_term", [&] {
    if (st == want) return verdict(true, format_term(st));
    if (order(st) != order(want)) return verdict(false, format_term(st) + " vs " + format_term(want));
    if (order(want) > opts.cap) return json{{"status", "skipped"}, {"detail", "order above cap"}};
    auto iso = is_isomorphic(perm_rep(st), perm_rep(want), opts.cap);
    if (iso == IsoResult::Undecided) return json{{"status", "skipped"}, {"detail", "undecided"}};
    return verdict(iso == IsoResult::Isomorphic, format_term(st) + " vs " + format_term(want));
  });
  add("containment", [&] {
    std::vector<GraphAut> all;
    try {
      all = all_value_preserving_auts(g, {opts.aut_cap, opts.node_limit});
    } catch (const ContractError& e) {
      if (e.code() != "Overflow") throw;
      return json{{"status", "skipped"}, {"detail", "full automorphism group above cap"}};
    }
    std::unordered_set<GraphAut, decltype([](const GraphAut& a) {
                         return PermHash{}(a.vertex_perm) * 31 + PermHash{}(a.edge_perm);
                       })>
        members(all.begin(), all.end());
    bool inside = std::all_of(gens.begin(), gens.end(), [&](const GraphAut& a) { return members.count(a) > 0; });
    return verdict(inside, {{"full_order", all.size()}});
  });
  return {{"ok", ok}, {"checks", checks}};
}

CommandResult cmd_realize(const RealizeRequest& req) {
  return guarded(
      "realize",
      [&] {
        auto plan = plan_realization(req);
        auto rec = run_plan(plan);
        fs::path out(req.out);
        const auto term = requested_term(plan);
        write_file(out / "field.json", save_field(rec.field));
        write_file(out / "record.json", record_to_json(rec).dump());
        json manifest{{"term", req.term},
                      {"normalized_term", format_term(term)},
                      {"case", case_label(plan)},
                      {"base", format_term(plan.base)},
                      {"n", plan.n},
                      {"m", plan.m},
                      {"grid", {rec.field.width(), rec.field.height()}},
                      {"counts", counts_json(rec.counts)},
                      {"files", {{"field", "field.json"}, {"record", "record.json"}}}};
        write_file(out / "manifest.json", manifest.dump(2) + "\n");
        manifest["ok"] = true;
        manifest["out"] = out.string();
        return CommandResult{0, manifest};
      },
      {"GridCapExceeded"});
}

CommandResult cmd_analyze(const std::string& field_path, const std::vector<std::string>& emit, const std::string& out) {
  return guarded("analyze", [&] {
    auto f = load_field(read_file(field_path));
    json rep = analyze_field(f);
    fs::path dir(out);
    json written = json::array();
    for (const auto& e : emit) {
      if (e == "dot") {
        write_file(dir / "reeb.dot", export_dot(build_reeb(f)));
        written.push_back("reeb.dot");
      } else if (e == "json") {
        write_file(dir / "reeb.json", export_json(build_reeb(f)).dump());
        written.push_back("reeb.json");
      } else if (e == "pgm") {
        write_file(dir / "field.pgm", export_pgm(f));
        written.push_back("field.pgm");
      } else {
        throw InputError("InvalidParameter", "--emit takes dot, json or pgm");
      }
    }
    rep["written"] = written;
    bool ok = rep["euler_check"].get<bool>();
    rep["ok"] = ok;
    return CommandResult{ok ? 0 : 1, rep};
  });
}

CommandResult cmd_verify(const std::string& field_path, const std::string& record_path, const std::string& term,
                         VerifyOptions opts) {
  return guarded("verify", [&] {
    auto f = load_field(read_file(field_path));
    json rj;
    try {
      rj = json::parse(read_file(record_path));
    } catch (const json::exception& e) {
      throw InputError("MalformedJson", e.what());
    }
    auto rec = record_from_json(rj);
    auto grid = rj.at("grid").get<std::vector<int>>();
    if (grid.size() != 2 || grid[0] != f.width() || grid[1] != f.height())
      throw InputError("RecordMismatch", "record grid does not match the field");
    rec.field = std::move(f);
    auto t = parse_term(term);
    json rep = verify_realization(rec, t, opts);
    rep["term"] = format_term(normalize(t));
    return CommandResult{rep["ok"].get<bool>() ? 0 : 1, rep};
  });
}

// ---------------------------------------------------------------------------
// Corpus

std::vector<CorpusMember> corpus_members() {
  std::vector<CorpusMember> out;
  auto add = [&](const std::string& c, const std::string& base, std::uint64_t n, std::optional<std::uint64_t> m) {
    RealizeRequest r;
    r.term = base;
    r.case_name = c;
    r.n = n;
    r.m = m;
    std::string name = c + ":" + base + ":n" + std::to_string(n);
    if (m) name += ":m" + std::to_string(*m);
    out.push_back({name, r});
  };
  for (std::uint64_t n = 1; n <= 4; ++n) add("circuit", "1", n, {});
  for (std::uint64_t n = 1; n <= 4; ++n) add("circuit", "wr(1,2)", n, {});
  add("circuit", "wr(1,3)", 2, {});
  add("circuit", "wr(1,4)", 3, {});
  add("circuit", "prod(wr(1,2),wr(1,2))", 2, {});
  add("circuit", "wr(wr(1,2),2)", 2, {});
  add("circuit", "prod(wr(1,2),wr(1,3))", 1, {});
  for (std::uint64_t n = 1; n <= 2; ++n)
    for (std::uint64_t m = 1; m <= 2; ++m) add("tree", "1", n, m);
  for (std::uint64_t n = 1; n <= 2; ++n)
    for (std::uint64_t m = 1; m <= 2; ++m) add("tree", "wr(1,2)", n, m);
  add("tree", "wr(1,3)", 1, 2);
  add("tree", "wr(1,4)", 1, 1);
  for (std::uint64_t n = 1; n <= 3; ++n) add("simple", "1", n, {});
  for (std::uint64_t n = 1; n <= 3; ++n) add("simple", "wr(1,2)", n, {});
  add("simple", "wr(wr(1,2),2)", 2, {});
  add("simple", "prod(wr(1,2),wr(1,2))", 1, {});
  return out;
}

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

ScalarField random_torus_field(std::uint64_t seed, int size) {
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    struct Wave {
      double amp, phase;
      int p, q;
    };
    std::vector<Wave> waves;
    for (int k = 0; k < 5; ++k) {
      int p = 0, q = 0;
      while (p == 0 && q == 0) {
        p = static_cast<int>(rng() % 5) - 2;
        q = static_cast<int>(rng() % 5) - 2;
      }
      waves.push_back({0.3 + 0.7 * unit(rng), 2 * std::numbers::pi * unit(rng), p, q});
    }
    std::vector<double> vals(static_cast<std::size_t>(size) * size);
    for (int y = 0; y < size; ++y)
      for (int x = 0; x < size; ++x) {
        double s = 0;
        for (const auto& w : waves) s += w.amp * std::cos(2 * std::numbers::pi * (w.p * x + w.q * y) / size + w.phase);
        vals[static_cast<std::size_t>(y) * size + x] = s;
      }
    try {
      auto f = perturb_ties(ScalarField(DomainKind::Torus, size, size, std::move(vals)));
      validate_field(f);
      classify_vertices(f);
      return f;
    } catch (const Error&) {
      continue;
    }
  }
  throw ContractError("InternalAssertion", "no PL-Morse random field after 100 attempts");
}

std::vector<double> random_regular_values(const ScalarField& f, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
  std::set<double> taken(f.values().begin(), f.values().end());
  std::vector<double> out;
  while (static_cast<int>(out.size()) < count) {
    double t = *lo + (*hi - *lo) * unit(rng);
    if (t > *lo && t < *hi && !taken.count(t)) out.push_back(t);
  }
  return out;
}

CommandResult cmd_corpus(std::uint64_t seed, const std::string& out_dir, VerifyOptions opts) {
  return guarded("corpus", [&] {
    json members = json::array();
    std::ostringstream tsv;
    tsv << "name\tterm\tgrid\tc0\tc1\tc2\tgenerated_order\tok\n";
    bool all_ok = true;
    for (const auto& mem : corpus_members()) {
      json row{{"name", mem.name}};
      try {
        auto plan = plan_realization(mem.request);
        auto built = run_plan(plan);
        // Go through the same serialized form cmd_verify reads.
        auto rec = record_from_json(json::parse(record_to_json(built).dump()));
        rec.field = load_field(save_field(built.field));
        auto term = requested_term(plan);
        auto rep = verify_realization(rec, term, opts);
        row["term"] = format_term(term);
        row["grid"] = {rec.field.width(), rec.field.height()};
        row["counts"] = counts_json(rec.counts);
        row["ok"] = rep["ok"];
        json failed = json::array();
        std::string gen_order = "-";
        for (const auto& c : rep["checks"]) {
          if (c["status"] == "fail") failed.push_back(c);
          if (c["name"] == "generated_group" && c["status"] == "pass") gen_order = c["detail"].dump();
        }
        row["generated_order"] = gen_order;
        row["checks"] = rep["checks"];
        if (!failed.empty()) row["failed"] = failed;
        tsv << mem.name << '\t' << row["term"].get<std::string>() << '\t' << rec.field.width() << 'x'
            << rec.field.height() << '\t' << rec.counts.c0 << '\t' << rec.counts.c1 << '\t' << rec.counts.c2 << '\t'
            << gen_order << '\t' << (rep["ok"].get<bool>() ? "pass" : "FAIL") << '\n';
      } catch (const Error& e) {
        row["ok"] = false;
        row["error"] = error_json(e.code(), e.what());
        tsv << mem.name << "\t-\t-\t-\t-\t-\t-\tFAIL\n";
      }
      all_ok = all_ok && row["ok"].get<bool>();
      members.push_back(std::move(row));
    }

    json randoms = json::array();
    for (int k = 0; k < 10; ++k) {
      std::uint64_t s = seed * 1000003u + static_cast<std::uint64_t>(k);
      json row{{"index", k}};
      try {
        auto f = random_torus_field(s);
        auto g = build_reeb(f);
        auto shape = classify_shape(g);
        int mismatches = 0;
        for (double t : random_regular_values(f, s ^ 0x9e3779b97f4a7c15ull, 20))
          mismatches += level_component_count(f, t) != edges_spanning(g, t);
        bool ok = mismatches == 0 && euler_check(f) && shape.betti1 <= 1;
        row["counts"] = counts_json(morse_counts(f));
        row["betti1"] = shape.betti1;
        row["mismatches"] = mismatches;
        row["ok"] = ok;
      } catch (const Error& e) {
        row["ok"] = false;
        row["error"] = error_json(e.code(), e.what());
      }
      all_ok = all_ok && row["ok"].get<bool>();
      randoms.push_back(std::move(row));
    }

    json summary{{"seed", seed}, {"realizations", members}, {"random_fields", randoms}, {"ok", all_ok}};
    fs::path dir(out_dir);
    write_file(dir / "summary.json", summary.dump(2) + "\n");
    write_file(dir / "summary.tsv", tsv.str());
    json rep{{"ok", all_ok},
             {"seed", seed},
             {"realizations", members.size()},
             {"random_fields", randoms.size()},
             {"summary", (dir / "summary.json").string()}};
    return CommandResult{all_ok ? 0 : 1, rep};
  });
}

}  // namespace kr

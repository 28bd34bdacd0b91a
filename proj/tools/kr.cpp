#include <CLI11.hpp>
#include <iostream>

#include "kr/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Realize and verify automorphism groups of Kronrod-Reeb graphs on the torus"};
  app.require_subcommand(1);

  kr::RealizeRequest req;
  std::uint64_t n = 0, m = 0;
  auto* realize = app.add_subcommand("realize", "Build a field realizing a group term");
  realize->add_option("--term", req.term, "Group term, e.g. wr(1,3)")->required();
  realize->add_option("--case", req.case_name, "circuit, tree or simple")
      ->check(CLI::IsMember({"circuit", "tree", "simple"}));
  auto* n_opt = realize->add_option("--n", n, "Cyclic index (term is then the base)");
  auto* m_opt = realize->add_option("--m", m, "Second lattice index (tree case)");
  realize->add_option("--out", req.out, "Output directory");

  std::string field, record, term, out = ".";
  std::vector<std::string> emit;
  auto* analyze = app.add_subcommand("analyze", "Report critical points, Reeb shape and exports of a field");
  analyze->add_option("field,--field", field, "Field JSON")->required();
  analyze->add_option("--emit", emit, "dot, json and/or pgm")->check(CLI::IsMember({"dot", "json", "pgm"}));
  analyze->add_option("--out", out, "Directory for exports");

  kr::VerifyOptions vopts;
  auto* verify = app.add_subcommand("verify", "Check a realization against a term");
  verify->add_option("--field", field, "Field JSON")->required();
  verify->add_option("--record", record, "Record JSON")->required();
  verify->add_option("--term", term, "Expected group term")->required();
  verify->add_option("--cap", vopts.cap, "Group enumeration cap");

  std::uint64_t seed = 0;
  auto* corpus = app.add_subcommand("corpus", "Realize and verify the sampled term grid plus random fields");
  corpus->add_option("--seed", seed, "Seed for the random fields");
  corpus->add_option("--out", out, "Directory for the summary");
  corpus->add_option("--cap", vopts.cap, "Group enumeration cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    nlohmann::json err{{"ok", false}, {"error", {{"code", "UsageError"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << '\n';
    return 2;
  }

  kr::CommandResult r;
  if (*realize) {
    if (*n_opt) req.n = n;
    if (*m_opt) req.m = m;
    r = kr::cmd_realize(req);
  } else if (*analyze) {
    r = kr::cmd_analyze(field, emit, out);
  } else if (*verify) {
    r = kr::cmd_verify(field, record, term, vopts);
  } else {
    r = kr::cmd_corpus(seed, out, vopts);
  }
  std::cout << r.report.dump(2) << '\n';
  return r.exit_code;
}

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kr/realize.hpp"
#include "kr/vendor_json.hpp"

namespace kr {

// 0 success, 1 verification failure, 2 input error, 3 internal assertion.
struct CommandResult {
  int exit_code = 0;
  nlohmann::json report;
};

struct RealizeRequest {
  std::string term;
  std::string case_name = "circuit";
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> m;
  std::string out = ".";
};

// Base term and parameters a request resolves to.
struct RealizePlan {
  CaseKind kind = CaseKind::Circuit;
  bool simple = false;
  GroupTerm base;
  std::uint64_t n = 1;
  std::uint64_t m = 1;
};

// Throws InputError when the term does not fit the case.
RealizePlan plan_realization(const RealizeRequest& req);
ConstructionRecord run_plan(const RealizePlan& plan);

// In-memory pipeline reports; `rec.field` must be set.
nlohmann::json analyze_field(const ScalarField& f);
struct VerifyOptions {
  std::uint64_t cap = 5000;
  std::uint64_t aut_cap = 10000;
  std::uint64_t node_limit = 1'000'000;
};
// {"ok": bool, "checks": [{"name", "status": pass|fail|skipped, "detail"}]}
nlohmann::json verify_realization(const ConstructionRecord& rec, const GroupTerm& term, VerifyOptions opts = {});

CommandResult cmd_realize(const RealizeRequest& req);
CommandResult cmd_analyze(const std::string& field_path, const std::vector<std::string>& emit, const std::string& out);
CommandResult cmd_verify(const std::string& field_path, const std::string& record_path, const std::string& term,
                         VerifyOptions opts = {});
CommandResult cmd_corpus(std::uint64_t seed, const std::string& out_dir, VerifyOptions opts = {});

// Corpus pieces, exposed for the acceptance harness.
struct CorpusMember {
  std::string name;
  RealizeRequest request;
};
std::vector<CorpusMember> corpus_members();
// Random PL-Morse torus field from the seeded trigonometric-sum family.
ScalarField random_torus_field(std::uint64_t seed, int size = 16);
// Regular values for the level oracle (no vertex takes them).
std::vector<double> random_regular_values(const ScalarField& f, std::uint64_t seed, int count);

}  // namespace kr

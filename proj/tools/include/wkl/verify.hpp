#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "wkl/limits.hpp"
#include "wkl/params.hpp"

namespace wkl {

struct VerifyOptions {
  std::vector<KernelQuery> points{{0.5, 0.0, 0.5, 0.0}, {0.5, 0.0, 1.0, 1.0}};
  std::vector<double> T_dbm{10.0, 50.0, 200.0};
  std::vector<double> T_flat{5.0, 20.0, 80.0};
  std::vector<double> T_residue{20.0, 40.0, 80.0, 160.0};
  double residue_s = 0.5;
  double residue_x = 0.0;
  double decay_ratio = 10.0;
  double tail_t = 1.0;
  double tail_A = 0.0;
  double tail_T = 50.0;
  double tail_rel_tol = 1e-5;
  double count_A = 8.0;
  double count_T = 200.0;
  double count_tol = 0.05;
  std::vector<std::vector<SpacePoint>> symmetry_points{
      {{-0.5, 0.3}, {0.2, -0.1}, {0.5, 0.5}},
      {{0.0, 0.0}, {0.2, 1.0}},
      {{-0.3, -1.0}, {-0.3, 0.5}, {0.1, 0.0}}};
  bool probe = false;
  std::uint64_t seed = 0;
};

enum class CheckStatus { pass, fail, skipped };
const char* status_name(CheckStatus s);

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::fail;
  std::string note;
  nlohmann::ordered_json detail;
};

struct VerifyReport {
  std::string what;
  std::vector<CheckResult> checks;
  std::vector<SweepReport> sweeps;  // for the CSV
  std::vector<std::string> warnings;
  bool pass() const;
};

// Groups k = 1.. with m_1 = ... = m_{k-1} = 1.
std::vector<int> admissible_levels(const WandererParams& p);

// what: sweep-dbm, sweep-flat, residues, tail-count, symmetry or all. A single
// check whose hypotheses fail throws AssumptionViolated; under "all" it is
// recorded as skipped.
VerifyReport run_verify(const std::string& what, const WandererParams& p, const VerifyOptions& opt);

nlohmann::ordered_json report_json(const VerifyReport& r, const WandererParams& p,
                                   const VerifyOptions& opt);
std::string report_csv(const VerifyReport& r);

}  // namespace wkl

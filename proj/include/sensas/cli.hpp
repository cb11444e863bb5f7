#pragma once

#include "sensas/first_order.hpp"
#include "sensas/model.hpp"
#include "sensas/paradigm.hpp"
#include "sensas/second_order.hpp"

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sensas::cli {

enum class Method { fsap, asap, so_fsap, so_asap, fd };
std::string_view to_string(Method method);
/// Throws std::invalid_argument for unknown names.
Method parse_method(std::string_view name);

struct ProblemPath {
  std::filesystem::path path;
};
struct BuiltinFixture {
  std::string name;  // P1, D1 or D2
};

/// File, builtin name, slab description, or an already built problem.
using ProblemSource = std::variant<ProblemPath, BuiltinFixture, SlabConfig, Problem>;

struct RunRequest {
  ProblemSource problem_source = BuiltinFixture{"P1"};
  Method method = Method::so_asap;
  int order = 2;
  std::filesystem::path output_dir = ".";
  bool symmetrize = false;
  std::optional<double> fd_rel_step;
  bool check_only = false;
};

namespace exit_status {
inline constexpr int ok = 0;
inline constexpr int parse_error = 2;
inline constexpr int inconsistent_derivatives = 3;
inline constexpr int singular_operator = 4;
inline constexpr int unwritable_output = 5;
}  // namespace exit_status

/// Step used for the derivative-callback probe that precedes every run, and
/// the largest block discrepancy it tolerates.
inline constexpr double kConsistencyStep = 1e-5;
inline constexpr double kConsistencyTolerance = 1e-4;

struct RunResults {
  Method method = Method::so_asap;
  Index parameter_count = 0;
  std::vector<std::string> names;
  std::optional<SensitivityGradient> gradient;
  std::optional<HessianMatrix> hessian;
  SolveLedger ledger;
};

Problem load_problem(const ProblemSource& source);

/// Throws std::invalid_argument for forbidden combinations (order 2 with fsap/asap, bad order).
void validate_request(const RunRequest& request);

/// Runs the selected method on an already checked problem.
RunResults execute(const Problem& problem, const RunRequest& request);

class ReportWriteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string gradient_csv(const SensitivityGradient& gradient, const std::vector<std::string>& names);
std::string hessian_csv(const Matrix& values);
std::string ledger_text(const RunResults& results);

/// Writes gradient.csv / hessian.csv (whichever are present) and ledger.txt.
/// Files are staged under temporary names and renamed only after all were
/// written, so a failure leaves none of them behind. Throws ReportWriteError.
std::vector<std::filesystem::path> write_reports(const RunResults& results,
                                                 const std::filesystem::path& output_dir);

/// Full pipeline; returns one of exit_status. Diagnostics go to `log`.
int run(const RunRequest& request, std::ostream& log);

}  // namespace sensas::cli

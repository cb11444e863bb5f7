#include "sensas/cli.hpp"

#include "sensas/errors.hpp"
#include "sensas/oracle.hpp"
#include "sensas/problem_file.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace sensas::cli {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::fsap: return "fsap";
    case Method::asap: return "asap";
    case Method::so_fsap: return "so-fsap";
    case Method::so_asap: return "so-asap";
    case Method::fd: return "fd";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::fsap, Method::asap, Method::so_fsap, Method::so_asap, Method::fd}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

Problem load_problem(const ProblemSource& source) {
  struct Loader {
    Problem operator()(const ProblemPath& p) const { return parse_problem_file(p.path); }
    Problem operator()(const BuiltinFixture& b) const {
      if (b.name == "P1") return build_scalar_fixture();
      if (b.name == "D1") return build_slab_diffusion(fixture_d1_config());
      if (b.name == "D2") return build_slab_diffusion(fixture_d2_config());
      throw std::invalid_argument("unknown builtin fixture '" + b.name + "' (expected P1, D1 or D2)");
    }
    Problem operator()(const SlabConfig& cfg) const { return build_slab_diffusion(cfg); }
    Problem operator()(const Problem& p) const { return p; }
  };
  return std::visit(Loader{}, source);
}

void validate_request(const RunRequest& request) {
  if (request.order != 1 && request.order != 2) throw std::invalid_argument("order must be 1 or 2");
  if (request.order == 2 && (request.method == Method::fsap || request.method == Method::asap)) {
    throw std::invalid_argument("method " + std::string(to_string(request.method)) +
                                " computes gradients only; use order 1");
  }
  if (request.fd_rel_step && !(*request.fd_rel_step > 0.0)) {
    throw std::invalid_argument("fd step must be positive");
  }
}

RunResults execute(const Problem& problem, const RunRequest& request) {
  RunResults out;
  out.method = request.method;
  out.parameter_count = problem.parameter_count();
  for (Index k = 0; k < out.parameter_count; ++k) out.names.push_back(problem.alpha0.name(k));
  const HessianOptions hopts{request.symmetrize};
  const bool hessian = request.order == 2;

  if (request.method == Method::fd) {
    FDConfig gradient_cfg;
    FDConfig hessian_cfg = kHessianFDConfig;
    if (request.fd_rel_step) gradient_cfg.rel_step = hessian_cfg.rel_step = *request.fd_rel_step;
    out.gradient = fd_gradient(problem, gradient_cfg);
    out.ledger = out.gradient->ledger;
    if (hessian) {
      out.hessian = fd_hessian(problem, hessian_cfg);
      if (request.symmetrize) out.hessian->symmetrized = true;  // already symmetric by construction
      out.ledger += out.hessian->ledger;
    }
    return out;
  }

  NominalSystem sys(problem);
  const StateVector u0 = evaluate_nominal(sys);
  const bool forward = request.method == Method::fsap || request.method == Method::so_fsap;
  if (forward) {
    out.gradient = fsap_gradient(sys, u0);
    if (hessian) out.hessian = so_fsap_hessian(sys, u0, adjoint_solve(sys, u0), hopts);
  } else {
    const AdjointVector psi0 = adjoint_solve(sys, u0);
    out.gradient = asap_gradient(sys, u0, psi0);
    if (hessian) out.hessian = so_asap_hessian(sys, u0, psi0, hopts);
  }
  out.ledger = sys.ledger();
  return out;
}

std::string gradient_csv(const SensitivityGradient& gradient, const std::vector<std::string>& names) {
  std::string s = "index,name,value\n";
  for (Index k = 0; k < gradient.values.size(); ++k) {
    const auto slot = static_cast<std::size_t>(k);
    s += std::to_string(k + 1) + ',' + (slot < names.size() ? names[slot] : "alpha" + std::to_string(k + 1)) + ',' +
         format_real(gradient.values[k]) + '\n';
  }
  return s;
}

std::string hessian_csv(const Matrix& values) {
  std::string s = "i,j,value\n";
  for (Index i = 0; i < values.rows(); ++i) {
    for (Index j = 0; j < values.cols(); ++j) {
      s += std::to_string(i + 1) + ',' + std::to_string(j + 1) + ',' + format_real(values(i, j)) + '\n';
    }
  }
  return s;
}

std::string ledger_text(const RunResults& results) {
  const SolveLedger& l = results.ledger;
  const auto n = static_cast<std::int64_t>(results.parameter_count);
  std::ostringstream os;
  os << "method=" << to_string(results.method) << '\n'
     << "parameters=" << n << '\n'
     << "factorizations=" << l.factorizations << '\n'
     << "nominal_solves=" << l.nominal_solves << '\n'
     << "forward_sensitivity_solves=" << l.forward_sensitivity_solves << '\n'
     << "adjoint_solves=" << l.adjoint_solves << '\n'
     << "sensitivity_total=" << l.sensitivity_total() << '\n'
     << "paper_formula_so_asap=2*N+1=" << so_asap_nominal_count(n) << '\n'
     << "paper_formula_so_fsap=N^2/2+3N/2=" << so_fsap_nominal_count(n) << '\n';
  if (results.hessian) {
    os << "hessian_asymmetry=" << format_real(results.hessian->asymmetry) << '\n'
       << "symmetrized=" << (results.hessian->symmetrized ? 1 : 0) << '\n';
  }
  return os.str();
}

namespace fs = std::filesystem;

std::vector<fs::path> write_reports(const RunResults& results, const fs::path& output_dir) {
  std::vector<std::pair<std::string, std::string>> files;
  if (results.gradient) files.emplace_back("gradient.csv", gradient_csv(*results.gradient, results.names));
  if (results.hessian) files.emplace_back("hessian.csv", hessian_csv(results.hessian->values));
  files.emplace_back("ledger.txt", ledger_text(results));

  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (!fs::is_directory(output_dir, ec)) {
    throw ReportWriteError("output directory '" + output_dir.string() + "' is not usable");
  }

  std::vector<fs::path> staged;
  auto discard = [&] {
    for (const auto& p : staged) fs::remove(p, ec);
  };
  for (const auto& [name, body] : files) {
    const fs::path tmp = output_dir / ("." + name + ".tmp");
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (os) staged.push_back(tmp);
    os << body;
    os.close();
    if (!os) {
      discard();
      throw ReportWriteError("cannot write '" + (output_dir / name).string() + "'");
    }
  }

  std::vector<fs::path> written;
  for (std::size_t f = 0; f < files.size(); ++f) {
    const fs::path target = output_dir / files[f].first;
    fs::rename(staged[f], target, ec);
    if (ec) {
      discard();
      for (const auto& p : written) fs::remove(p, ec);
      throw ReportWriteError("cannot move report into place at '" + target.string() + "'");
    }
    written.push_back(target);
  }
  return written;
}

int run(const RunRequest& request, std::ostream& log) {
  Problem problem;
  try {
    validate_request(request);
    problem = load_problem(request.problem_source);
    problem.validate();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_status::parse_error;
  }

  try {
    const ConsistencyReport report = check_derivative_callbacks(problem, kConsistencyStep);
    if (const BlockDiscrepancy* bad = report.first_exceeding(kConsistencyTolerance)) {
      log << "error: derivative callback '" << bad->block << "' disagrees with finite differences (relative "
          << format_real(bad->max_relative) << " > " << format_real(kConsistencyTolerance) << ")\n";
      return exit_status::inconsistent_derivatives;
    }
    if (request.check_only) {
      for (const auto& b : report.blocks) log << b.block << ' ' << format_real(b.max_relative) << '\n';
      return exit_status::ok;
    }

    const RunResults results = execute(problem, request);
    for (const auto& p : write_reports(results, request.output_dir)) log << "wrote " << p.string() << '\n';
    return exit_status::ok;
  } catch (const SingularMatrixError& e) {
    log << "error: " << e.what() << '\n';
    return exit_status::singular_operator;
  } catch (const ReportWriteError& e) {
    log << "error: " << e.what() << '\n';
    return exit_status::unwritable_output;
  }
}

}  // namespace sensas::cli

// Batch front-end: sensas --builtin P1 --method so-asap --out results/

#include "sensas/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  namespace cli = sensas::cli;
  CLI::App app{"Exact gradients and Hessians of responses of parameterized linear systems"};

  std::string problem_path;
  std::string builtin;
  std::string method = "so-asap";
  int order = 0;
  std::string out = ".";
  double fd_step = 0.0;
  cli::RunRequest request;

  auto* problem_opt = app.add_option("--problem", problem_path, "Problem file (SENSAS-PROBLEM v1)");
  auto* builtin_opt = app.add_option("--builtin", builtin, "Builtin fixture")->check(CLI::IsMember({"P1", "D1", "D2"}));
  problem_opt->excludes(builtin_opt);
  app.add_option("--method", method, "fsap | asap | so-fsap | so-asap | fd")
      ->check(CLI::IsMember({"fsap", "asap", "so-fsap", "so-asap", "fd"}));
  auto* order_opt = app.add_option("--order", order, "1 = gradient, 2 = gradient and Hessian")->check(CLI::Range(1, 2));
  app.add_option("--out", out, "Output directory");
  app.add_flag("--symmetrize", request.symmetrize, "Report (H + H^T)/2");
  auto* step_opt = app.add_option("--fd-step", fd_step, "Relative finite-difference step (method fd)");
  app.add_flag("--check-only", request.check_only, "Only run the derivative-callback check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::exit_status::parse_error;
  }

  if (*problem_opt) {
    request.problem_source = cli::ProblemPath{problem_path};
  } else if (*builtin_opt) {
    request.problem_source = cli::BuiltinFixture{builtin};
  }
  request.method = cli::parse_method(method);
  if (*order_opt) {
    request.order = order;
  } else {
    request.order = (request.method == cli::Method::so_asap || request.method == cli::Method::so_fsap) ? 2 : 1;
  }
  request.output_dir = out;
  if (*step_opt) request.fd_rel_step = fd_step;

  return cli::run(request, std::cerr);
}

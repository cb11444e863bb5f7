#include "sensas/cli.hpp"
#include "sensas/paradigm.hpp"
#include "sensas/problem_file.hpp"
#include "support.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

using namespace sensas;
using namespace sensas::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SENSAS_TEST_DATA_DIR;

struct ScratchDir {
  fs::path path;
  ScratchDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("sensas_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string read(const std::string& name) const {
    std::ifstream in(path / name, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }
  bool empty() const { return fs::is_empty(path); }
};

int run_quiet(const RunRequest& r) {
  std::ostringstream log;
  return run(r, log);
}

RunRequest request(ProblemSource src, Method m, int order, const fs::path& out) {
  RunRequest r;
  r.problem_source = std::move(src);
  r.method = m;
  r.order = order;
  r.output_dir = out;
  return r;
}

Matrix read_hessian(const std::string& csv, Index n) {
  Matrix h = Matrix::Constant(n, n, std::nan(""));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    int i = 0, j = 0;
    double v = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream(line) >> i >> c1 >> j >> c2 >> v;
    h(i - 1, j - 1) = v;
  }
  return h;
}

}  // namespace

TEST_CASE("method names") {
  CHECK(parse_method("so-asap") == Method::so_asap);
  CHECK(parse_method("fd") == Method::fd);
  CHECK(to_string(Method::so_fsap) == "so-fsap");
  CHECK_THROWS_AS(parse_method("newton"), std::invalid_argument);
}

TEST_CASE("request validation") {
  RunRequest r;
  CHECK_NOTHROW(validate_request(r));
  r.method = Method::fsap;
  CHECK_THROWS_AS(validate_request(r), std::invalid_argument);
  r.order = 1;
  CHECK_NOTHROW(validate_request(r));
  r.order = 3;
  CHECK_THROWS_AS(validate_request(r), std::invalid_argument);
  r = RunRequest{};
  r.fd_rel_step = -1.0;
  CHECK_THROWS_AS(validate_request(r), std::invalid_argument);
}

TEST_CASE("P1 with SO-ASAP") {
  ScratchDir out;
  REQUIRE(run_quiet(request(BuiltinFixture{"P1"}, Method::so_asap, 2, out.path)) == exit_status::ok);
  CHECK(out.read("hessian.csv") == "i,j,value\n1,1,1\n1,2,-0.25\n2,1,-0.25\n2,2,0\n");
  CHECK(out.read("gradient.csv") == "index,name,value\n1,alpha1,-1\n2,alpha2,0.5\n");
  const std::string ledger = out.read("ledger.txt");
  CHECK(ledger.find("sensitivity_total=5\n") != std::string::npos);
  CHECK(ledger.find("paper_formula_so_asap=2*N+1=5\n") != std::string::npos);
  CHECK(ledger.find("paper_formula_so_fsap=N^2/2+3N/2=5\n") != std::string::npos);
  CHECK(ledger.find("nominal_solves=1\n") != std::string::npos);
  CHECK(ledger.find("forward_sensitivity_solves=") != std::string::npos);
  CHECK(ledger.find("adjoint_solves=") != std::string::npos);
}

TEST_CASE("P1 with ASAP") {
  ScratchDir out;
  REQUIRE(run_quiet(request(BuiltinFixture{"P1"}, Method::asap, 1, out.path)) == exit_status::ok);
  CHECK(out.read("gradient.csv") == "index,name,value\n1,alpha1,-1\n2,alpha2,0.5\n");
  CHECK(out.read("ledger.txt").find("sensitivity_total=1\n") != std::string::npos);
  CHECK_FALSE(fs::exists(out.path / "hessian.csv"));
}

TEST_CASE("P1 with the FD oracle") {
  ScratchDir a, b;
  REQUIRE(run_quiet(request(BuiltinFixture{"P1"}, Method::fd, 2, a.path)) == exit_status::ok);
  REQUIRE(run_quiet(request(BuiltinFixture{"P1"}, Method::so_asap, 2, b.path)) == exit_status::ok);
  const Matrix fd = read_hessian(a.read("hessian.csv"), 2);
  const Matrix an = read_hessian(b.read("hessian.csv"), 2);
  CHECK(testing::max_abs(Matrix(fd - an)) <= 1e-6);

  ScratchDir c;
  RunRequest coarse = request(BuiltinFixture{"P1"}, Method::fd, 2, c.path);
  coarse.fd_rel_step = 1e-2;
  REQUIRE(run_quiet(coarse) == exit_status::ok);
  CHECK(c.read("hessian.csv") != a.read("hessian.csv"));
}

TEST_CASE("three-parameter accounting line") {
  ScratchDir out;
  REQUIRE(run_quiet(request(BuiltinFixture{"D1"}, Method::so_fsap, 2, out.path)) == exit_status::ok);
  const std::string ledger = out.read("ledger.txt");
  CHECK(ledger.find("paper_formula_so_fsap=N^2/2+3N/2=9\n") != std::string::npos);
  CHECK(ledger.find("sensitivity_total=7\n") != std::string::npos);
  CHECK(fs::exists(out.path / "gradient.csv"));
  CHECK(fs::exists(out.path / "hessian.csv"));
}

TEST_CASE("hessian.csv lists all entries row-major") {
  ScratchDir out;
  REQUIRE(run_quiet(request(BuiltinFixture{"D2"}, Method::so_asap, 2, out.path)) == exit_status::ok);
  std::istringstream in(out.read("hessian.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "i,j,value");
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) {
      REQUIRE(std::getline(in, line));
      CHECK(line.rfind(std::to_string(i) + "," + std::to_string(j) + ",", 0) == 0);
    }
  }
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("symmetrize flag") {
  ScratchDir out;
  RunRequest r = request(BuiltinFixture{"D2"}, Method::so_asap, 2, out.path);
  r.symmetrize = true;
  REQUIRE(run_quiet(r) == exit_status::ok);
  const Matrix h = read_hessian(out.read("hessian.csv"), 3);
  CHECK(h == h.transpose());
  CHECK(out.read("ledger.txt").find("symmetrized=1") != std::string::npos);
}

TEST_CASE("problem file round trip reproduces the in-memory run") {
  ScratchDir files;
  const fs::path problem = files.path / "p1.problem";
  {
    std::ofstream os(problem, std::ios::binary);
    os << serialize_problem(scalar_fixture_data(), scalar_fixture_alpha0());
  }
  ScratchDir from_file, from_memory;
  REQUIRE(run_quiet(request(ProblemPath{problem}, Method::so_asap, 2, from_file.path)) == exit_status::ok);
  REQUIRE(run_quiet(request(build_scalar_fixture(), Method::so_asap, 2, from_memory.path)) == exit_status::ok);
  CHECK(from_file.read("hessian.csv") == from_memory.read("hessian.csv"));
  CHECK(from_file.read("ledger.txt") == from_memory.read("ledger.txt"));
  // Serialization does not carry parameter names.
  CHECK(from_file.read("gradient.csv") == from_memory.read("gradient.csv"));
}

TEST_CASE("hand-written data files") {
  ScratchDir out;
  CHECK(run_quiet(request(ProblemPath{kData / "p1.problem"}, Method::so_asap, 2, out.path)) == exit_status::ok);
  CHECK(out.read("hessian.csv") == "i,j,value\n1,1,1\n1,2,-0.25\n2,1,-0.25\n2,2,0\n");
  ScratchDir slab;
  CHECK(run_quiet(request(ProblemPath{kData / "slab_two_region.problem"}, Method::so_asap, 2, slab.path)) ==
        exit_status::ok);
  CHECK(slab.read("gradient.csv").find("6,S2,") != std::string::npos);
}

TEST_CASE("planted faults map to exit statuses and leave no output") {
  struct Case {
    ProblemSource source;
    Method method;
    int order;
    int status;
  };
  Problem wrong_d1 = build_scalar_fixture();
  auto good = wrong_d1.op.d1;
  wrong_d1.op.d1 = [good](const Vector& a, Index k) -> Matrix { return 2.0 * good(a, k); };

  const std::vector<Case> cases{
      {ProblemPath{kData / "bad_token.problem"}, Method::so_asap, 2, exit_status::parse_error},
      {ProblemPath{kData / "l0_too_tall.problem"}, Method::so_asap, 2, exit_status::parse_error},
      {ProblemPath{kData / "does_not_exist.problem"}, Method::so_asap, 2, exit_status::parse_error},
      {BuiltinFixture{"P7"}, Method::so_asap, 2, exit_status::parse_error},
      {BuiltinFixture{"P1"}, Method::asap, 2, exit_status::parse_error},
      {wrong_d1, Method::so_asap, 2, exit_status::inconsistent_derivatives},
      {ProblemPath{kData / "ill_scaled.problem"}, Method::asap, 1, exit_status::inconsistent_derivatives},
      {ProblemPath{kData / "p1_singular.problem"}, Method::so_asap, 2, exit_status::singular_operator},
      {ProblemPath{kData / "p1_singular.problem"}, Method::fd, 1, exit_status::singular_operator},
  };
  for (const Case& c : cases) {
    ScratchDir out;
    CHECK(run_quiet(request(c.source, c.method, c.order, out.path)) == c.status);
    CHECK(out.empty());
  }
}

TEST_CASE("unwritable output directory") {
  ScratchDir scratch;
  const fs::path blocker = scratch.path / "not_a_directory";
  std::ofstream(blocker) << "x";
  CHECK(run_quiet(request(BuiltinFixture{"P1"}, Method::so_asap, 2, blocker / "out")) ==
        exit_status::unwritable_output);

  // A directory squatting on one of the report names makes the final rename fail;
  // the reports that were already moved into place are taken back out.
  ScratchDir partial;
  fs::create_directories(partial.path / "ledger.txt" / "occupied");
  CHECK(run_quiet(request(BuiltinFixture{"P1"}, Method::so_asap, 2, partial.path)) ==
        exit_status::unwritable_output);
  CHECK_FALSE(fs::exists(partial.path / "gradient.csv"));
  CHECK_FALSE(fs::exists(partial.path / "hessian.csv"));
  CHECK_FALSE(fs::exists(partial.path / ".ledger.txt.tmp"));
}

TEST_CASE("check-only writes nothing") {
  ScratchDir out;
  RunRequest r = request(BuiltinFixture{"D1"}, Method::so_asap, 2, out.path);
  r.check_only = true;
  std::ostringstream log;
  CHECK(run(r, log) == exit_status::ok);
  CHECK(out.empty());
  CHECK(log.str().find("operator.d1") != std::string::npos);
}

TEST_CASE("slab configs run directly") {
  ScratchDir out;
  CHECK(run_quiet(request(fixture_d2_config(), Method::so_fsap, 2, out.path)) == exit_status::ok);
}

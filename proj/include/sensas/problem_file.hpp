#pragma once

#include "sensas/model.hpp"
#include "sensas/paradigm.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <variant>

namespace sensas {

inline constexpr std::string_view kProblemMagic = "SENSAS-PROBLEM v1";

struct AffineProblemDefinition {
  AffineQuadraticProblem data;
  ParameterVector alpha0;
};

/// Contents of a problem file: explicit affine-quadratic blocks or a slab description.
using ProblemDefinition = std::variant<AffineProblemDefinition, SlabConfig>;

/// Parses the text of a problem file. Locale independent. Throws ParseError
/// (line/column when known) or ShapeError for block-size mismatches.
ProblemDefinition parse_problem_definition(std::string_view text);

Problem build_problem(const ProblemDefinition& definition);

/// Reads, parses and builds. Throws ParseError if the file cannot be read.
Problem parse_problem_file(const std::filesystem::path& path);

/// Writes every block (zero blocks included) with 17 significant digits, so
/// parsing the result reproduces the data bit for bit.
std::string serialize_problem(const AffineQuadraticProblem& data, const ParameterVector& alpha0);
std::string serialize_slab(const SlabConfig& cfg);

/// 17 significant digits, '.' decimal separator regardless of locale.
std::string format_real(double value);

}  // namespace sensas

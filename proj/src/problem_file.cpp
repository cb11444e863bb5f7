#include "sensas/problem_file.hpp"

#include "sensas/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace sensas {

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

struct Token {
  std::string_view text;
  std::size_t column;  // 1-based
};

struct Line {
  std::size_t number;  // 1-based
  std::vector<Token> tokens;
};

std::vector<Token> tokenize(std::string_view line) {
  if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<Token> tokens;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; };
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) tokens.push_back({line.substr(start, i - start), start + 1});
  }
  return tokens;
}

std::optional<double> to_real(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

double parse_real(const Token& t, std::size_t line) {
  const auto v = to_real(t.text);
  if (!v) throw ParseError("non-numeric token '" + std::string(t.text) + "'", line, t.column);
  if (!std::isfinite(*v)) throw ParseError("non-finite value '" + std::string(t.text) + "'", line, t.column);
  return *v;
}

long parse_integer(const Token& t, std::size_t line) {
  long v = 0;
  const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (res.ec != std::errc{} || res.ptr != t.text.data() + t.text.size()) {
    throw ParseError("expected an integer, got '" + std::string(t.text) + "'", line, t.column);
  }
  return v;
}

enum class Shape { vector, matrix, inline_only };

// A directive with its numeric payload. Vector payloads may start on the
// directive line; matrix payloads take one line per row.
struct Block {
  std::string name;
  std::size_t line = 0;
  Shape shape = Shape::vector;
  std::vector<std::vector<double>> rows;
  std::vector<long> indices;  // 1-based parameter indices from the header
};

struct Collected {
  std::optional<Block> dims;
  std::map<std::string, Block> blocks;  // affine blocks keyed by canonical name
  std::optional<Block> slab;
  std::vector<Block> regions;
  std::optional<Block> detector;
  std::optional<std::pair<std::string, std::size_t>> response_kind;
};

void expect_token_count(const Line& line, std::size_t count, const std::string& directive) {
  if (line.tokens.size() != count) {
    throw ParseError("directive '" + directive + "' takes " + std::to_string(count - 1) + " argument(s)",
                     line.number, line.tokens.front().column);
  }
}

std::vector<double> numbers(const Line& line, std::size_t first) {
  std::vector<double> out;
  for (std::size_t t = first; t < line.tokens.size(); ++t) out.push_back(parse_real(line.tokens[t], line.number));
  return out;
}

Block header_block(const Line& line, std::string name, Shape shape, std::size_t index_count, std::size_t first_index) {
  Block b;
  b.line = line.number;
  b.shape = shape;
  for (std::size_t t = 0; t < index_count; ++t) {
    if (first_index + t >= line.tokens.size()) {
      throw ParseError("block '" + name + "' is missing an index", line.number, line.tokens.back().column);
    }
    const long idx = parse_integer(line.tokens[first_index + t], line.number);
    b.indices.push_back(idx);
    name += " " + std::to_string(idx);
  }
  b.name = std::move(name);
  const std::size_t payload = first_index + index_count;
  if (payload < line.tokens.size()) {
    if (shape == Shape::matrix) {
      throw ParseError("matrix block '" + b.name + "' expects its rows on the following lines", line.number,
                       line.tokens[payload].column);
    }
    b.rows.push_back(numbers(line, payload));
  }
  return b;
}

Collected collect(std::string_view text) {
  std::vector<Line> lines;
  {
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = text.find('\n', pos);
      const std::string_view raw = text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
      ++number;
      if (number == 1) {
        std::string_view first = raw;
        while (!first.empty() && (first.back() == '\r' || first.back() == ' ' || first.back() == '\t')) {
          first.remove_suffix(1);
        }
        if (first != kProblemMagic) throw ParseError("missing magic line '" + std::string(kProblemMagic) + "'", 1, 1);
      } else {
        Line line{number, tokenize(raw)};
        if (!line.tokens.empty()) lines.push_back(std::move(line));
      }
      if (end == std::string_view::npos) break;
      pos = end + 1;
    }
  }

  Collected out;
  Block* open = nullptr;  // block that still accepts numeric lines

  auto store = [&](Block b) -> Block* {
    auto [it, inserted] = out.blocks.emplace(b.name, b);
    if (!inserted) throw ParseError("duplicate block '" + b.name + "'", b.line, 1);
    return &it->second;
  };
  auto once = [](std::optional<Block>& slot, Block b) {
    if (slot) throw ParseError("duplicate directive '" + b.name + "'", b.line, 1);
    slot = std::move(b);
  };

  for (const Line& line : lines) {
    const Token& head = line.tokens.front();
    if (to_real(head.text)) {
      if (open == nullptr || open->shape == Shape::inline_only) {
        throw ParseError("numeric data outside of a block", line.number, head.column);
      }
      open->rows.push_back(numbers(line, 0));
      continue;
    }

    open = nullptr;
    const std::string directive(head.text);
    if (directive == "dims") {
      expect_token_count(line, 3, directive);
      Block b = header_block(line, "dims", Shape::inline_only, 0, 1);
      b.indices = {parse_integer(line.tokens[1], line.number), parse_integer(line.tokens[2], line.number)};
      b.rows.clear();
      once(out.dims, std::move(b));
    } else if (directive == "alpha0") {
      open = store(header_block(line, "alpha0", Shape::vector, 0, 1));
    } else if (directive == "matrix" || directive == "vector") {
      if (line.tokens.size() < 2) throw ParseError("'" + directive + "' needs a block name", line.number, head.column);
      const std::string kind(line.tokens[1].text);
      const bool is_matrix = directive == "matrix";
      const std::string base = is_matrix ? "L" : "q";
      const Shape shape = is_matrix ? Shape::matrix : Shape::vector;
      if (kind == base + "0") {
        open = store(header_block(line, kind, shape, 0, 2));
      } else if (kind == base) {
        open = store(header_block(line, kind, shape, 1, 2));
      } else if (kind == base + "2") {
        open = store(header_block(line, kind, shape, 2, 2));
      } else {
        throw ParseError("unknown " + directive + " block '" + kind + "'", line.number, line.tokens[1].column);
      }
    } else if (directive == "response") {
      if (line.tokens.size() < 2) throw ParseError("'response' needs a block name", line.number, head.column);
      const std::string kind(line.tokens[1].text);
      if (kind == "c" || kind == "d") {
        open = store(header_block(line, kind, Shape::vector, 0, 2));
      } else if (kind == "M" || kind == "N" || kind == "G") {
        open = store(header_block(line, kind, Shape::matrix, 0, 2));
      } else {
        throw ParseError("unknown response block '" + kind + "'", line.number, line.tokens[1].column);
      }
    } else if (directive == "slab") {
      expect_token_count(line, 3, directive);
      Block b = header_block(line, "slab", Shape::inline_only, 0, 2);
      b.rows = {{parse_real(line.tokens[1], line.number)}};
      b.indices = {parse_integer(line.tokens[2], line.number)};
      once(out.slab, std::move(b));
    } else if (directive == "region") {
      expect_token_count(line, 5, directive);
      out.regions.push_back(header_block(line, "region", Shape::inline_only, 0, 1));
    } else if (directive == "detector") {
      expect_token_count(line, 4, directive);
      once(out.detector, header_block(line, "detector", Shape::inline_only, 0, 1));
    } else if (directive == "response_kind") {
      expect_token_count(line, 2, directive);
      if (out.response_kind) throw ParseError("duplicate directive 'response_kind'", line.number, head.column);
      out.response_kind = std::pair{std::string(line.tokens[1].text), line.number};
    } else {
      throw ParseError("unknown directive '" + directive + "'", line.number, head.column);
    }
  }
  return out;
}

ParseError mismatch(const Block& b, const std::string& what) {
  return ParseError("dimension mismatch in block '" + b.name + "': " + what, b.line);
}

Vector as_vector(const Block& b, Index size) {
  std::vector<double> flat;
  for (const auto& row : b.rows) flat.insert(flat.end(), row.begin(), row.end());
  if (static_cast<Index>(flat.size()) != size) {
    throw mismatch(b, std::to_string(flat.size()) + " values, expected " + std::to_string(size));
  }
  return Eigen::Map<const Vector>(flat.data(), size);
}

Matrix as_matrix(const Block& b, Index rows, Index cols) {
  if (static_cast<Index>(b.rows.size()) != rows) {
    throw mismatch(b, std::to_string(b.rows.size()) + " rows, expected " + std::to_string(rows));
  }
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = b.rows[static_cast<std::size_t>(r)];
    if (static_cast<Index>(row.size()) != cols) {
      throw mismatch(b, "row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) + " values, expected " +
                            std::to_string(cols));
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)];
  }
  return m;
}

Index parameter_slot(const Block& b, long index, Index n) {
  if (index < 1 || index > n) {
    throw ParseError("block '" + b.name + "': parameter index out of range 1.." + std::to_string(n), b.line);
  }
  return static_cast<Index>(index - 1);
}

AffineProblemDefinition build_affine(const Collected& c) {
  if (!c.dims) throw ParseError("missing 'dims' directive");
  const long k_u = c.dims->indices[0];
  const long n = c.dims->indices[1];
  if (k_u < 1 || n < 1) throw ParseError("'dims' needs positive sizes", c.dims->line);

  AffineProblemDefinition def{AffineQuadraticProblem::zeros(k_u, n), ParameterVector{Vector::Zero(n), {}}};
  AffineQuadraticProblem& d = def.data;
  for (const auto& [name, b] : c.blocks) {
    const std::string kind = name.substr(0, name.find(' '));
    if (kind == "alpha0") {
      def.alpha0.values = as_vector(b, n);
    } else if (kind == "L0") {
      d.L0 = as_matrix(b, k_u, k_u);
    } else if (kind == "L") {
      d.L[static_cast<std::size_t>(parameter_slot(b, b.indices[0], n))] = as_matrix(b, k_u, k_u);
    } else if (kind == "L2" || kind == "q2") {
      const Index j = parameter_slot(b, b.indices[0], n);
      const Index k = parameter_slot(b, b.indices[1], n);
      if (j > k) throw ParseError("block '" + name + "': indices must satisfy j <= k", b.line);
      if (kind == "L2") {
        d.L2.set(j, k, as_matrix(b, k_u, k_u));
      } else {
        d.q2.set(j, k, as_vector(b, k_u));
      }
    } else if (kind == "q0") {
      d.q0 = as_vector(b, k_u);
    } else if (kind == "q") {
      d.q[static_cast<std::size_t>(parameter_slot(b, b.indices[0], n))] = as_vector(b, k_u);
    } else if (kind == "c") {
      d.c = as_vector(b, k_u);
    } else if (kind == "M") {
      d.M = as_matrix(b, k_u, k_u);
    } else if (kind == "N") {
      d.N = as_matrix(b, k_u, n);
    } else if (kind == "d") {
      d.d = as_vector(b, n);
    } else if (kind == "G") {
      d.G = as_matrix(b, n, n);
    }
  }
  return def;
}

SlabConfig build_slab(const Collected& c) {
  if (!c.slab) throw ParseError("slab description needs a 'slab <length> <cells>' directive");
  SlabConfig cfg;
  cfg.length = c.slab->rows[0][0];
  cfg.cells = static_cast<Index>(c.slab->indices[0]);
  for (const Block& r : c.regions) {
    const auto& v = r.rows.at(0);
    cfg.regions.push_back(SlabRegion{v[0], v[1], v[2], v[3]});
  }
  if (c.detector) {
    const auto& v = c.detector->rows.at(0);
    cfg.detector = SlabDetector{v[0], v[1], v[2]};
  }
  if (c.response_kind) {
    const auto& [kind, line] = *c.response_kind;
    if (kind == "linear_detector") {
      cfg.response_kind = SlabResponse::linear_detector;
    } else if (kind == "quadratic_norm") {
      cfg.response_kind = SlabResponse::quadratic_norm;
    } else {
      throw ParseError("unknown response_kind '" + kind + "'", line);
    }
  }
  return cfg;
}

}  // namespace

ProblemDefinition parse_problem_definition(std::string_view text) {
  const Collected c = collect(text);
  const bool slab = c.slab || !c.regions.empty() || c.detector || c.response_kind;
  const bool affine = c.dims || !c.blocks.empty();
  if (slab && affine) throw ParseError("a problem file cannot mix slab directives with matrix blocks");
  if (slab) return build_slab(c);
  return build_affine(c);
}

Problem build_problem(const ProblemDefinition& definition) {
  if (const auto* slab = std::get_if<SlabConfig>(&definition)) return build_slab_diffusion(*slab);
  const auto& affine = std::get<AffineProblemDefinition>(definition);
  return build_affine_quadratic_problem(affine.data, affine.alpha0);
}

Problem parse_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open problem file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return build_problem(parse_problem_definition(buf.str()));
}

namespace {

void write_row(std::ostream& os, const auto& values) {
  for (Index i = 0; i < values.size(); ++i) os << (i ? " " : "") << format_real(values[i]);
  os << '\n';
}

void write_matrix(std::ostream& os, const std::string& header, const Matrix& m) {
  os << header << '\n';
  for (Index r = 0; r < m.rows(); ++r) write_row(os, m.row(r));
}

void write_vector(std::ostream& os, const std::string& header, const Vector& v) {
  os << header << ' ';
  write_row(os, v);
}

}  // namespace

std::string serialize_problem(const AffineQuadraticProblem& data, const ParameterVector& alpha0) {
  data.validate();
  std::ostringstream os;
  const Index n = data.parameter_count();
  os << kProblemMagic << '\n';
  os << "dims " << data.state_size() << ' ' << n << '\n';
  write_vector(os, "alpha0", alpha0.values);
  write_matrix(os, "matrix L0", data.L0);
  for (Index k = 0; k < n; ++k) write_matrix(os, "matrix L " + std::to_string(k + 1), data.L[static_cast<std::size_t>(k)]);
  for (const auto& [key, block] : data.L2.entries()) {
    write_matrix(os, "matrix L2 " + std::to_string(key.first + 1) + " " + std::to_string(key.second + 1), block);
  }
  write_vector(os, "vector q0", data.q0);
  for (Index k = 0; k < n; ++k) write_vector(os, "vector q " + std::to_string(k + 1), data.q[static_cast<std::size_t>(k)]);
  for (const auto& [key, block] : data.q2.entries()) {
    write_vector(os, "vector q2 " + std::to_string(key.first + 1) + " " + std::to_string(key.second + 1), block);
  }
  write_vector(os, "response c", data.c);
  write_matrix(os, "response M", data.M);
  write_matrix(os, "response N", data.N);
  write_vector(os, "response d", data.d);
  write_matrix(os, "response G", data.G);
  return os.str();
}

std::string serialize_slab(const SlabConfig& cfg) {
  cfg.validate();
  std::ostringstream os;
  os << kProblemMagic << '\n';
  os << "slab " << format_real(cfg.length) << ' ' << cfg.cells << '\n';
  for (const auto& r : cfg.regions) {
    os << "region " << format_real(r.span) << ' ' << format_real(r.diffusion) << ' ' << format_real(r.absorption)
       << ' ' << format_real(r.source) << '\n';
  }
  os << "detector " << format_real(cfg.detector.lo) << ' ' << format_real(cfg.detector.hi) << ' '
     << format_real(cfg.detector.sigma) << '\n';
  os << "response_kind " << to_string(cfg.response_kind) << '\n';
  return os.str();
}

}  // namespace sensas

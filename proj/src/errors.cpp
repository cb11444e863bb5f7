#include "sensas/errors.hpp"

#include <sstream>

namespace sensas {
namespace {

std::string singular_message(std::ptrdiff_t pivot_index, double pivot_magnitude, const std::string& context) {
  std::ostringstream os;
  os << "singular matrix: pivot " << pivot_index + 1 << " has magnitude " << pivot_magnitude;
  if (!context.empty()) os << " (" << context << ")";
  return os.str();
}

std::string located(const std::string& message, std::size_t line, std::size_t column) {
  if (line == 0) return message;
  std::ostringstream os;
  os << "line " << line;
  if (column != 0) os << ", column " << column;
  os << ": " << message;
  return os.str();
}

}  // namespace

SingularMatrixError::SingularMatrixError(std::ptrdiff_t pivot_index, double pivot_magnitude,
                                         const std::string& context)
    : Error(singular_message(pivot_index, pivot_magnitude, context)),
      pivot_index_(pivot_index),
      pivot_magnitude_(pivot_magnitude) {}

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : Error(located(message, line, column)), line_(line), column_(column) {}

}  // namespace sensas

#ifndef MVF_ERRORS_HPP
#define MVF_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace mvf {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file (carries record context in the message).
struct ParseError : Error {
  using Error::Error;
};

/// Violated data invariant (disconnected graph, negative radius, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// Iterative solver breakdown or stagnation; keeps the residual history.
struct SolveError : Error {
  std::vector<double> residual_history;
  SolveError(const std::string& msg, std::vector<double> history)
      : Error(msg), residual_history(std::move(history)) {}
};

/// Structurally singular system detected before the solve.
struct SingularSystemError : Error {
  using Error::Error;
};

/// A requested experiment cannot be set up (e.g. no nodes on a facet).
struct InfeasibleError : Error {
  using Error::Error;
};

}  // namespace mvf

#endif

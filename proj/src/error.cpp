#include "hvib/error.hpp"

namespace hvib {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::asymmetry: return "asymmetry";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::numerical_failure: return "numerical-failure";
    case ErrorKind::no_unique_solution: return "no-unique-solution";
    case ErrorKind::non_periodic_antiderivative: return "non-periodic-antiderivative";
    case ErrorKind::transform: return "transform";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::unattainable: return "unattainable";
    case ErrorKind::numerical_inconsistency: return "numerical-inconsistency";
    case ErrorKind::no_reference: return "no-reference";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace hvib

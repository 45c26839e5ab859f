#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hvib {

/// Failure categories shared by every module. The CLI maps them onto exit codes.
enum class ErrorKind {
  dimension,
  asymmetry,
  precondition,
  numerical_failure,
  no_unique_solution,
  non_periodic_antiderivative,
  transform,
  infeasible,
  unattainable,
  numerical_inconsistency,
  no_reference,
  divergence,
  config,
  io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace hvib

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lvar {

/// Named failure conditions raised by the library.
enum class ErrorKind {
  InvalidArgument,
  CyclicLatent,
  NonStationary,
  InsufficientData,
  SingularCovariance,
  InconsistentRecovery,
  NotIdentifiable,
  AmbiguousDistance,
  CapExceeded,
  ScaleExceeded,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lvar

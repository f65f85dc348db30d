#pragma once

#include <stdexcept>
#include <string>

namespace wate {

/** Base class for all library errors. */
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/** Invalid caller input (bad argument, malformed data, broken precondition). */
struct InputError : Error {
  explicit InputError(const std::string& msg) : Error(msg) {}
};

/** A nuisance value left (0,1) during path integration or evaluation. */
struct PositivityBreach : Error {
  double t_reached;
  explicit PositivityBreach(const std::string& msg, double t = 0.0)
      : Error(msg), t_reached(t) {}
};

/** The score equation has no sign change inside the allowed bracket. */
struct NoRootError : Error {
  explicit NoRootError(const std::string& msg) : Error(msg) {}
};

/** Successive fixed-point sweeps moved apart instead of contracting. */
struct NonContractionError : Error {
  explicit NonContractionError(const std::string& msg) : Error(msg) {}
};

}  // namespace wate

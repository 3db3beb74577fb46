#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mhdc {

// Exit codes used by the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitValidation = 2, kExitDiverged = 3 };

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
  virtual int exit_code() const { return kExitValidation; }
};

struct PreconditionError : Error {
  using Error::Error;
};

// Internal arrays disagree with the grid they claim to live on.
struct StructuralError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct FormatError : Error {
  FormatError(const std::string& what, std::uint64_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"), offset(offset) {}
  std::uint64_t offset;
};

struct InfeasibleCover : Error {
  using Error::Error;
};

struct CflViolation : Error {
  CflViolation(double dt, double admissible)
      : Error("time step " + std::to_string(dt) + " exceeds admissible " +
              std::to_string(admissible)),
        dt(dt), admissible_dt(admissible) {}
  double dt;
  double admissible_dt;
  int exit_code() const override { return kExitDiverged; }
};

struct DivergedError : Error {
  explicit DivergedError(long step)
      : Error("non-finite value detected at step " + std::to_string(step)), step(step) {}
  long step;
  int exit_code() const override { return kExitDiverged; }
};

}  // namespace mhdc

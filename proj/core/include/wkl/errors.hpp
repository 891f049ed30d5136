#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wkl {

enum class ErrorCode {
  NotNonincreasing,
  NegativeEntry,
  PoleHit,
  BadResolution,
  AngleOutOfRange,
  PoleOnContour,
  ContourOrderViolation,
  NonpositiveTime,
  Overflow,
  ZeroTime,
  CollisionAtStep,
  AcceptanceFloor,
  NonErgodicWindow,
  OrderingViolation,
  AssumptionViolated,
  EmptyData,
  InvalidArgument,
  ConfigError,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Warnings go to stderr unless a handler is installed.
using WarningHandler = std::function<void(std::string_view)>;
void set_warning_handler(WarningHandler handler);
void warn(std::string_view message);

}  // namespace wkl

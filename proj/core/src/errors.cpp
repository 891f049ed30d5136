#include "wkl/errors.hpp"

#include <iostream>
#include <mutex>

namespace wkl {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotNonincreasing: return "NotNonincreasing";
    case ErrorCode::NegativeEntry: return "NegativeEntry";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::BadResolution: return "BadResolution";
    case ErrorCode::AngleOutOfRange: return "AngleOutOfRange";
    case ErrorCode::PoleOnContour: return "PoleOnContour";
    case ErrorCode::ContourOrderViolation: return "ContourOrderViolation";
    case ErrorCode::NonpositiveTime: return "NonpositiveTime";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ZeroTime: return "ZeroTime";
    case ErrorCode::CollisionAtStep: return "CollisionAtStep";
    case ErrorCode::AcceptanceFloor: return "AcceptanceFloor";
    case ErrorCode::NonErgodicWindow: return "NonErgodicWindow";
    case ErrorCode::OrderingViolation: return "OrderingViolation";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::EmptyData: return "EmptyData";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {
std::mutex g_warn_mutex;
WarningHandler g_handler;
}  // namespace

void set_warning_handler(WarningHandler handler) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  g_handler = std::move(handler);
}

void warn(std::string_view message) {
  std::lock_guard<std::mutex> lock(g_warn_mutex);
  if (g_handler) {
    g_handler(message);
  } else {
    std::cerr << "warning: " << message << '\n';
  }
}

}  // namespace wkl

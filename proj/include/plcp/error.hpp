#ifndef PLCP_ERROR_HPP
#define PLCP_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace plcp {

enum class Errc {
  NonFinite,
  NegativeIntensity,
  ZeroMu,
  NonPositiveScale,
  NonPositiveRadius,
  UnknownLine,
  TBeyondClip,
  PolicyBudgetNegative,
  NegativeT,
  DegenerateAngles,
  DomainError,
  QuadratureFailure,
  GridMismatch,
  NoBracket,
  InvalidArgument,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::NonFinite: return "NonFinite";
    case Errc::NegativeIntensity: return "NegativeIntensity";
    case Errc::ZeroMu: return "ZeroMu";
    case Errc::NonPositiveScale: return "NonPositiveScale";
    case Errc::NonPositiveRadius: return "NonPositiveRadius";
    case Errc::UnknownLine: return "UnknownLine";
    case Errc::TBeyondClip: return "TBeyondClip";
    case Errc::PolicyBudgetNegative: return "PolicyBudgetNegative";
    case Errc::NegativeT: return "NegativeT";
    case Errc::DegenerateAngles: return "DegenerateAngles";
    case Errc::DomainError: return "DomainError";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::NoBracket: return "NoBracket";
    case Errc::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this type. `field()`
/// names the offending input where one exists.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string field, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code),
        field_(std::move(field)) {}

  Errc code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  Errc code_;
  std::string field_;
};

/// Adaptive integration ran out of subdivisions. Carries the best estimate
/// reached and, for nested integrals, the outer coordinates of the panel
/// that failed (outermost first).
class QuadratureError : public Error {
 public:
  QuadratureError(double best, double error_estimate, std::vector<double> where,
                  const std::string& what)
      : Error(Errc::QuadratureFailure, "tolerance", what),
        best_(best),
        error_estimate_(error_estimate),
        where_(std::move(where)) {}

  double best_estimate() const noexcept { return best_; }
  double error_estimate() const noexcept { return error_estimate_; }
  const std::vector<double>& where() const noexcept { return where_; }

 private:
  double best_;
  double error_estimate_;
  std::vector<double> where_;
};

}  // namespace plcp

#endif  // PLCP_ERROR_HPP

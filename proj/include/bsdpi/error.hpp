#ifndef BSDPI_ERROR_HPP
#define BSDPI_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace bsdpi {

enum class ErrorKind {
  NotHermitian,
  NotPsd,
  BadTrace,
  NoConvergence,
  DomainViolation,
  DimMismatch,
  BadRank,
  SupportMismatch,
  InvalidChannel,
  SingularState,
  Diverging,
  BadBeta,
  MissingMeasureParams,
  ParseError,
  ConfigError,
};

inline std::string_view to_string(ErrorKind kind)
{
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::BadTrace: return "BadTrace";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DomainViolation: return "DomainViolation";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::BadRank: return "BadRank";
    case ErrorKind::SupportMismatch: return "SupportMismatch";
    case ErrorKind::InvalidChannel: return "InvalidChannel";
    case ErrorKind::SingularState: return "SingularState";
    case ErrorKind::Diverging: return "Diverging";
    case ErrorKind::BadBeta: return "BadBeta";
    case ErrorKind::MissingMeasureParams: return "MissingMeasureParams";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind)
  {
  }

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

} // namespace bsdpi

#endif // BSDPI_ERROR_HPP

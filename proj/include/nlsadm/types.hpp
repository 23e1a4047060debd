#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

namespace nlsadm {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

enum class ErrorCode {
  InvalidTriple,
  OnCut,
  BranchPoint,
  SingularPoint,
  Overflow,
  IllConditioned,
  DivisionByZero,
  OutOfWindow,
  InvalidPairing,
  DegenerateCut,
  DegenerateOmega,
  StripViolation,
  NoConvergence,
  ConfigError,
  IOError,
  InternalInconsistency,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidTriple: return "InvalidTriple";
    case ErrorCode::OnCut: return "OnCut";
    case ErrorCode::BranchPoint: return "BranchPoint";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::OutOfWindow: return "OutOfWindow";
    case ErrorCode::InvalidPairing: return "InvalidPairing";
    case ErrorCode::DegenerateCut: return "DegenerateCut";
    case ErrorCode::DegenerateOmega: return "DegenerateOmega";
    case ErrorCode::StripViolation: return "StripViolation";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Sign of the cubic nonlinearity: +1 defocusing, -1 focusing.
enum class Mode : int { Focusing = -1, Defocusing = 1 };

inline double lambda_of(Mode m) { return static_cast<double>(static_cast<int>(m)); }

/// Boundary parameters: Dirichlet amplitude alpha, frequency omega and
/// Neumann coefficient c, together with the focusing/defocusing sign.
struct Triple {
  double alpha = 1.0;
  double omega = 0.0;
  cplx c{0.0, 0.0};
  Mode mode = Mode::Defocusing;

  Triple() = default;
  Triple(double a, double w, cplx cc, Mode m = Mode::Defocusing) : alpha(a), omega(w), c(cc), mode(m) {
    validate();
  }

  void validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw Error(ErrorCode::InvalidTriple, "alpha must be a finite positive number");
    if (!std::isfinite(omega) || !std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw Error(ErrorCode::InvalidTriple, "omega and c must be finite");
  }

  double lambda() const { return lambda_of(mode); }
  double c1() const { return c.real(); }
  double c2() const { return c.imag(); }

  /// Characteristic length in the k-plane; all roots and branch points scale with it.
  double k_scale() const {
    return std::max({alpha, std::sqrt(std::abs(omega)), std::sqrt(std::abs(c))});
  }

  /// Endpoints of the cut joining -ic/(2 alpha) and i conj(c)/(2 alpha).
  cplx c_point_lower() const { return -I * c / (2.0 * alpha); }
  cplx c_point_upper() const { return I * std::conj(c) / (2.0 * alpha); }
};

inline Mat2 sigma3() {
  Mat2 s;
  s << 1.0, 0.0, 0.0, -1.0;
  return s;
}

inline Mat2 diag_exp(cplx a) {
  // exp(a sigma3)
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::exp(a);
  m(1, 1) = std::exp(-a);
  return m;
}

inline double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace nlsadm

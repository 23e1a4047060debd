#pragma once

#include "nlsadm/types.hpp"

#include <array>

namespace nlsadm {

/// The quartic 4k^4 + 2 omega k^2 + 4 lambda alpha Im(c) k + (omega/2 + lambda alpha^2)^2 - lambda |c|^2.
///
/// Coefficients are stored degree-descending. They are real for every triple,
/// so they are kept as doubles; `complex_coeffs()` gives the complex view.
/// `bounds` holds magnitudes of the unsimplified terms of each coefficient,
/// which is the scale against which rounding in the coefficient is measured.
struct OmegaSquared {
  std::array<double, 5> coeffs{};
  std::array<double, 5> bounds{};
  Triple source;

  std::array<cplx, 5> complex_coeffs() const {
    std::array<cplx, 5> c;
    for (int i = 0; i < 5; ++i) c[i] = coeffs[i];
    return c;
  }

  /// j-th derivative at k (j = 0..4), Horner on the differentiated coefficients.
  cplx derivative(int j, cplx k) const {
    cplx acc = 0.0;
    for (int i = 0; i <= 4 - j; ++i) {
      const int power = 4 - i;
      double factor = 1.0;
      for (int m = 0; m < j; ++m) factor *= static_cast<double>(power - m);
      acc = acc * k + coeffs[i] * factor;
    }
    return acc;
  }

  cplx operator()(cplx k) const { return derivative(0, k); }

  /// Magnitude scale of the j-th derivative at k: sum of |term| with the
  /// coefficient bounds and |k| replaced by max(|k|, k_scale).
  double derivative_scale(int j, cplx k) const {
    const double s = std::max(std::abs(k), source.k_scale());
    double acc = 0.0;
    for (int i = 0; i <= 4 - j; ++i) {
      const int power = 4 - i;
      double factor = 1.0;
      for (int m = 0; m < j; ++m) factor *= static_cast<double>(power - m);
      acc = acc * s + bounds[i] * factor;
    }
    return acc;
  }
};

inline OmegaSquared build_omega_squared(const Triple& t) {
  t.validate();
  const double lam = t.lambda();
  const double a = t.alpha;
  const double w = t.omega;
  const double shift = w / 2.0 + lam * a * a;
  const double c_abs2 = std::norm(t.c);
  OmegaSquared q;
  q.source = t;
  q.coeffs = {4.0, 0.0, 2.0 * w, 4.0 * lam * a * t.c2(), shift * shift - lam * c_abs2};
  const double shift_bound = std::abs(w) / 2.0 + a * a;
  q.bounds = {4.0, 0.0, 2.0 * std::abs(w), 4.0 * a * std::abs(t.c2()), shift_bound * shift_bound + c_abs2};
  return q;
}

/// Boundary matrix of the t-part with q = alpha e^{i omega t}, q_x = c e^{i omega t}.
inline Mat2 build_Qtilde_b(const Triple& t, double time, cplx k) {
  const double lam = t.lambda();
  const cplx phase = std::exp(I * (t.omega * time));
  const cplx q = t.alpha * phase;
  const cplx qx = t.c * phase;
  Mat2 m;
  m(0, 0) = -I * lam * std::norm(q);
  m(0, 1) = 2.0 * k * q + I * qx;
  m(1, 0) = 2.0 * k * lam * std::conj(q) - I * lam * std::conj(qx);
  m(1, 1) = I * lam * std::norm(q);
  return m;
}

/// x-part potential [[0, q], [lambda conj(q), 0]].
inline Mat2 build_Q(double lam, cplx q) {
  Mat2 m;
  m << 0.0, q, lam * std::conj(q), 0.0;
  return m;
}

}  // namespace nlsadm

#ifndef TWINFOCUS_QUARTIC_HPP
#define TWINFOCUS_QUARTIC_HPP

#include <algorithm>
#include <cmath>
#include <vector>

// Real-root solvers for monic quadratic, cubic and quartic polynomials.
// Cubic roots come from the trigonometric/Cardano form, quartic roots from
// Ferrari's resolvent; every root is polished with a few Newton steps on the
// original polynomial, which is what keeps the downstream argmax candidates
// at full double precision.

namespace twinfocus {

// x^2 + b x + c = 0
inline int solve_quadratic(double b, double c, double roots[2]) {
  const double disc = b * b - 4.0 * c;
  if (disc < 0.0) return 0;
  const double sq = std::sqrt(disc);
  const double q = b > 0.0 ? -0.5 * (b + sq) : -0.5 * (b - sq);
  if (q == 0.0) {
    roots[0] = 0.0;
    roots[1] = -b;
    return 2;
  }
  roots[0] = q;
  roots[1] = c / q;
  return 2;
}

// x^3 + a x^2 + b x + c = 0; always returns at least one real root.
inline int solve_cubic(double a, double b, double c, double roots[3]) {
  const double a3 = a / 3.0;
  const double p = b - a * a3;                       // depressed: t^3 + p t + q
  const double q = c + a3 * (2.0 * a3 * a3 - b);
  const double half_q = 0.5 * q;
  const double third_p = p / 3.0;
  const double disc = half_q * half_q + third_p * third_p * third_p;
  int count;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-half_q + sq);
    const double v = std::cbrt(-half_q - sq);
    roots[0] = u + v - a3;
    count = 1;
  } else if (disc == 0.0) {
    const double u = std::cbrt(-half_q);
    roots[0] = 2.0 * u - a3;
    roots[1] = -u - a3;
    count = 2;
  } else {
    const double r = std::sqrt(-third_p);
    const double arg = std::clamp(-half_q / (r * r * r), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    constexpr double two_pi_3 = 2.0943951023931953;
    for (int i = 0; i < 3; ++i) roots[i] = 2.0 * r * std::cos(phi - two_pi_3 * i) - a3;
    count = 3;
  }
  return count;
}

namespace detail {

inline double quartic_eval(double a, double b, double c, double d, double x) {
  return (((x + a) * x + b) * x + c) * x + d;
}

inline double quartic_deriv(double a, double b, double c, double x) {
  return ((4.0 * x + 3.0 * a) * x + 2.0 * b) * x + c;
}

inline void polish_quartic_root(double a, double b, double c, double d, double& x) {
  for (int it = 0; it < 16; ++it) {
    const double f = quartic_eval(a, b, c, d, x);
    const double df = quartic_deriv(a, b, c, x);
    if (df == 0.0) break;
    const double step = f / df;
    x -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(x))) break;
  }
}

}  // namespace detail

// x^4 + a x^3 + b x^2 + c x + d = 0. Returns the distinct real roots found
// (0 to 4), Newton-polished; multiple roots may be reported once.
inline int solve_quartic(double a, double b, double c, double d, double roots[4]) {
  // depressed quartic y^4 + p y^2 + q y + r, x = y - a/4
  const double a4 = 0.25 * a;
  const double p = b - 6.0 * a4 * a4;
  const double q = c - 2.0 * b * a4 + 8.0 * a4 * a4 * a4;
  const double r = d - c * a4 + b * a4 * a4 - 3.0 * a4 * a4 * a4 * a4;

  int count = 0;
  if (std::abs(q) < 1e-14 * (1.0 + std::abs(p) + std::abs(r))) {
    // biquadratic
    double z[2];
    const int nz = solve_quadratic(p, r, z);
    for (int i = 0; i < nz; ++i) {
      if (z[i] < 0.0) continue;
      const double s = std::sqrt(z[i]);
      roots[count++] = s - a4;
      if (s > 0.0) roots[count++] = -s - a4;
    }
  } else {
    // Ferrari: resolvent cubic z^3 + 2p z^2 + (p^2 - 4r) z - q^2 = 0 has a
    // nonnegative root z; then y^4 + p y^2 + q y + r factors into quadratics.
    double z3[3];
    const int nz = solve_cubic(2.0 * p, p * p - 4.0 * r, -q * q, z3);
    double z = -1.0;
    for (int i = 0; i < nz; ++i) z = std::max(z, z3[i]);
    if (z > 0.0) {
      const double w = std::sqrt(z);
      const double t1 = (p + z - q / w) * 0.5;
      const double t2 = (p + z + q / w) * 0.5;
      double qr[2];
      int nq = solve_quadratic(w, t1, qr);
      for (int i = 0; i < nq; ++i) roots[count++] = qr[i] - a4;
      nq = solve_quadratic(-w, t2, qr);
      for (int i = 0; i < nq; ++i) roots[count++] = qr[i] - a4;
    }
  }

  for (int i = 0; i < count; ++i) detail::polish_quartic_root(a, b, c, d, roots[i]);

  // drop duplicates introduced by polishing near multiple roots
  std::sort(roots, roots + count);
  int unique_count = 0;
  for (int i = 0; i < count; ++i) {
    if (unique_count > 0 && std::abs(roots[i] - roots[unique_count - 1]) <=
                                1e-12 * (1.0 + std::abs(roots[i])))
      continue;
    roots[unique_count++] = roots[i];
  }
  return unique_count;
}

}  // namespace twinfocus

#endif  // TWINFOCUS_QUARTIC_HPP

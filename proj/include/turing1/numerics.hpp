#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

// Polynomial and small dense-matrix numerics: characteristic polynomials,
// complex root sets, eigenvalues, and Hurwitz tests. Everything here is a
// pure function of its inputs; degrees and dimensions are tiny (n <= ~10).

namespace turing1::numerics {

struct Tolerances {
  double tol_root = 1e-9;     // root back-substitution residual scale
  double tol_eig = 1e-8;      // eigenvalue vs. char-poly-root agreement
  double tol_conj = 1e-8;     // imaginary parts below this snap to the axis
  double tol_hurwitz = 1e-9;  // stability margin for the root-based test
  double cluster = 1e-6;      // multiplicity grouping radius (times scale)
};

// Real polynomial, coefficients highest degree first. The leading coefficient
// is nonzero except for the zero polynomial, which is represented as {0}.
struct Poly {
  std::vector<double> c;

  Poly() : c{0.0} {}
  explicit Poly(std::vector<double> coeffs);

  int degree() const { return static_cast<int>(c.size()) - 1; }
  bool is_zero() const { return c.size() == 1 && c[0] == 0.0; }
  double scale() const;  // 1 + max |coefficient|
  Poly monic() const;    // idempotent; throws on the zero polynomial

  double eval(double s) const;
  std::complex<double> eval(std::complex<double> s) const;
  std::complex<double> deriv_eval(std::complex<double> s) const;

  // Taylor shift: returns q with q(s) = p(s + a).
  Poly shifted(double a) const;

  bool operator==(const Poly& o) const { return c == o.c; }
};

// Root multiset of a real polynomial. Non-real members occur in conjugate
// pairs (within tol_conj of exact pairing); order is (Re, Im) ascending.
struct ComplexRootSet {
  std::vector<std::complex<double>> roots;

  double max_real() const;
  // Groups members closer than radius into (representative, multiplicity).
  std::vector<std::pair<std::complex<double>, int>> clustered(double radius) const;
};

// Monic characteristic polynomial det(sI - M) via the Faddeev-LeVerrier
// recursion. Throws std::invalid_argument on non-square or non-finite input.
Poly char_poly(const Eigen::MatrixXd& M);

// All complex roots via companion-matrix eigenvalues plus Newton polish
// (closed forms for degrees 1-2). Residuals satisfy
// |p(r)| <= tol_root * scale * (1+|r|)^degree. Throws on the zero polynomial.
ComplexRootSet poly_roots(const Poly& p, const Tolerances& tol = {});

// Stability test: all roots strictly in the open left half-plane. Degrees 1-3
// use the closed-form coefficient conditions; higher degrees compare the
// rightmost computed root against -tol_hurwitz * scale.
bool is_hurwitz(const Poly& p, const Tolerances& tol = {});

// Eigenvalue multiset of a real square matrix; agrees with
// poly_roots(char_poly(M)) within tol_eig. Throws on non-square input.
ComplexRootSet eigenvalues(const Eigen::MatrixXd& M);

}  // namespace turing1::numerics

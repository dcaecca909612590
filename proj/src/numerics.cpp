#include "turing1/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace turing1::numerics {

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Deterministic ordering for root multisets.
void sort_roots(std::vector<std::complex<double>>& r) {
  std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

// Snap near-axis imaginary parts to zero and re-symmetrize conjugate pairs.
// Real-coefficient solvers produce pairs that are already conjugate to
// rounding; this pass only enforces the documented invariant exactly.
void canonicalize(std::vector<std::complex<double>>& r, double tol_conj) {
  for (auto& z : r)
    if (std::abs(z.imag()) <= tol_conj * (1.0 + std::abs(z))) z = {z.real(), 0.0};
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i].imag() > 0) pos.push_back(i);
    else if (r[i].imag() < 0) neg.push_back(i);
  }
  std::vector<bool> used(neg.size(), false);
  for (std::size_t ip : pos) {
    std::size_t best = neg.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < neg.size(); ++j) {
      if (used[j]) continue;
      double d = std::abs(r[ip] - std::conj(r[neg[j]]));
      if (d < best_d) { best_d = d; best = j; }
    }
    if (best == neg.size()) continue;  // unmatched; leave as computed
    used[best] = true;
    std::complex<double> w = 0.5 * (r[ip] + std::conj(r[neg[best]]));
    r[ip] = w;
    r[neg[best]] = std::conj(w);
  }
  sort_roots(r);
}

std::complex<double> newton_polish(const Poly& p, std::complex<double> r) {
  for (int it = 0; it < 4; ++it) {
    std::complex<double> f = p.eval(r);
    std::complex<double> df = p.deriv_eval(r);
    if (std::abs(df) < 1e-300) break;
    std::complex<double> step = f / df;
    std::complex<double> cand = r - step;
    if (std::abs(p.eval(cand)) < std::abs(f)) r = cand;
    else break;
  }
  return r;
}

}  // namespace

Poly::Poly(std::vector<double> coeffs) : c(std::move(coeffs)) {
  if (c.empty()) throw std::invalid_argument("polynomial needs at least one coefficient");
  if (!all_finite(c)) throw std::invalid_argument("polynomial has non-finite coefficients");
  // strip leading zeros, keep at least one coefficient
  std::size_t lead = 0;
  while (lead + 1 < c.size() && c[lead] == 0.0) ++lead;
  if (lead > 0) c.erase(c.begin(), c.begin() + static_cast<long>(lead));
}

double Poly::scale() const {
  double m = 0.0;
  for (double x : c) m = std::max(m, std::abs(x));
  return 1.0 + m;
}

Poly Poly::monic() const {
  if (is_zero()) throw std::invalid_argument("zero polynomial cannot be made monic");
  if (c[0] == 1.0) return *this;
  std::vector<double> out(c);
  for (double& x : out) x /= c[0];
  out[0] = 1.0;
  return Poly(std::move(out));
}

double Poly::eval(double s) const {
  double acc = 0.0;
  for (double k : c) acc = acc * s + k;
  return acc;
}

std::complex<double> Poly::eval(std::complex<double> s) const {
  std::complex<double> acc = 0.0;
  for (double k : c) acc = acc * s + k;
  return acc;
}

std::complex<double> Poly::deriv_eval(std::complex<double> s) const {
  std::complex<double> acc = 0.0;
  const int n = degree();
  for (int i = 0; i < n; ++i) acc = acc * s + c[static_cast<std::size_t>(i)] * double(n - i);
  return acc;
}

Poly Poly::shifted(double a) const {
  // Repeated synthetic division by (s - a); the successive remainders are
  // the Taylor coefficients of p at a, i.e. the coefficients of p(s + a).
  std::vector<double> w(c);
  const std::size_t n = w.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 1; i < n - k; ++i) w[i] += a * w[i - 1];
    out[n - 1 - k] = w[n - 1 - k];
  }
  return Poly(std::move(out));
}

double ComplexRootSet::max_real() const {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& r : roots) m = std::max(m, r.real());
  return m;
}

std::vector<std::pair<std::complex<double>, int>> ComplexRootSet::clustered(double radius) const {
  std::vector<std::pair<std::complex<double>, int>> out;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    std::complex<double> sum = roots[i];
    int count = 1;
    used[i] = true;
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      if (!used[j] && std::abs(roots[j] - roots[i]) <= radius) {
        sum += roots[j];
        ++count;
        used[j] = true;
      }
    }
    out.emplace_back(sum / double(count), count);
  }
  return out;
}

Poly char_poly(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols() || M.rows() < 1)
    throw std::invalid_argument("char_poly requires a square matrix");
  if (!M.allFinite())
    throw std::invalid_argument("char_poly requires finite entries");
  const long n = M.rows();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[0] = 1.0;
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(n, n);
  for (long k = 1; k <= n; ++k) {
    B = M * B;
    double ck = -B.trace() / double(k);
    c[static_cast<std::size_t>(k)] = ck;
    B.diagonal().array() += ck;
  }
  return Poly(std::move(c));
}

ComplexRootSet poly_roots(const Poly& p, const Tolerances& tol) {
  if (p.is_zero()) throw std::invalid_argument("poly_roots: zero polynomial");
  if (p.degree() < 1) return {};  // nonzero constant: no roots
  const Poly m = p.monic();
  const int n = m.degree();
  std::vector<std::complex<double>> roots;
  roots.reserve(static_cast<std::size_t>(n));

  if (n == 1) {
    roots.emplace_back(-m.c[1], 0.0);
  } else if (n == 2) {
    const double b = m.c[1], c0 = m.c[2];
    const double disc = b * b - 4.0 * c0;
    if (disc >= 0.0) {
      // stable quadratic formula: avoid cancellation in the smaller root
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      double r1 = q;
      double r2 = (q != 0.0) ? c0 / q : -b - q;
      if (b == 0.0 && c0 == 0.0) r1 = r2 = 0.0;
      roots.emplace_back(r1, 0.0);
      roots.emplace_back(r2, 0.0);
    } else {
      const double re = -0.5 * b, im = 0.5 * std::sqrt(-disc);
      roots.emplace_back(re, im);
      roots.emplace_back(re, -im);
    }
  } else {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -m.c[static_cast<std::size_t>(n - i)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("poly_roots: companion eigensolve failed");
    for (int i = 0; i < n; ++i) roots.push_back(newton_polish(m, es.eigenvalues()[i]));
  }

  canonicalize(roots, tol.tol_conj);
  ComplexRootSet out;
  out.roots = std::move(roots);
  return out;
}

bool is_hurwitz(const Poly& p, const Tolerances& tol) {
  if (p.is_zero()) throw std::invalid_argument("is_hurwitz: zero polynomial");
  if (p.degree() < 1) throw std::invalid_argument("is_hurwitz: degree must be >= 1");
  const Poly m = p.monic();
  switch (m.degree()) {
    case 1:
      return m.c[1] > 0.0;
    case 2:
      return m.c[1] > 0.0 && m.c[2] > 0.0;
    case 3:
      // a2 > 0, a0 > 0, a1*a2 - a0 > 0 (which forces a1 > 0)
      return m.c[1] > 0.0 && m.c[3] > 0.0 && m.c[1] * m.c[2] - m.c[3] > 0.0;
    default:
      return poly_roots(m, tol).max_real() < -tol.tol_hurwitz * m.scale();
  }
}

ComplexRootSet eigenvalues(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols() || M.rows() < 1)
    throw std::invalid_argument("eigenvalues requires a square matrix");
  if (!M.allFinite())
    throw std::invalid_argument("eigenvalues requires finite entries");
  std::vector<std::complex<double>> r;
  if (M.rows() == 1) {
    r.emplace_back(M(0, 0), 0.0);
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigenvalues: solver failed");
    for (long i = 0; i < M.rows(); ++i) r.push_back(es.eigenvalues()[i]);
  }
  Tolerances tol;
  canonicalize(r, tol.tol_conj);
  ComplexRootSet out;
  out.roots = std::move(r);
  return out;
}

}  // namespace turing1::numerics

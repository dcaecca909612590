#include "turing1/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace turing1::classify {

namespace {

using model::closed_loop_poly;
using model::mode_gain;
using numerics::ComplexRootSet;
using numerics::Poly;

double rightmost(const model::RationalTransfer& tf, double lambda) {
  return numerics::poly_roots(closed_loop_poly(tf, lambda)).max_real();
}

// Collects the roots within tol of the rightmost real part.
std::vector<std::complex<double>> rightmost_roots(const ComplexRootSet& rs, double tol) {
  std::vector<std::complex<double>> out;
  const double m = rs.max_real();
  for (const auto& r : rs.roots)
    if (r.real() >= m - tol) out.push_back(r);
  return out;
}

void append_unique(std::vector<std::complex<double>>& dst,
                   const std::vector<std::complex<double>>& src, double tol) {
  for (const auto& s : src) {
    bool dup = false;
    for (const auto& d : dst)
      if (std::abs(d - s) <= tol) { dup = true; break; }
    if (!dup) dst.push_back(s);
  }
}

// Splits P(j*w) into real/imaginary parts as polynomials in w
// (coefficients highest degree first). For real coefficients the real part
// is even in w and the imaginary part odd.
void axis_parts(const Poly& p, std::vector<double>& re, std::vector<double>& im) {
  const int deg = p.degree();
  re.assign(static_cast<std::size_t>(deg) + 1, 0.0);
  im.assign(static_cast<std::size_t>(deg) + 1, 0.0);
  for (int i = 0; i <= deg; ++i) {
    const int e = deg - i;  // power of (j*w) for coefficient c[i]
    const double c = p.c[static_cast<std::size_t>(i)];
    switch (e % 4) {
      case 0: re[static_cast<std::size_t>(i)] = c; break;
      case 1: im[static_cast<std::size_t>(i)] = c; break;
      case 2: re[static_cast<std::size_t>(i)] = -c; break;
      case 3: im[static_cast<std::size_t>(i)] = -c; break;
    }
  }
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Stable: return "Stable";
    case Kind::NotTuring: return "NotTuring";
    case Kind::TypeI: return "TypeI";
    case Kind::TypeII: return "TypeII";
  }
  return "?";
}

double default_tol_dom(const model::LinearSystem& sys) {
  return 1e-7 * (1.0 + sys.A.norm());
}

ComplexRootSet subsystem_poles(const model::RationalTransfer& tf,
                               const model::SpatialSpec& spec, int k) {
  if (k < 0 || k > spec.k_max)
    throw std::out_of_range("subsystem_poles: mode index outside [0, k_max]");
  return numerics::poly_roots(closed_loop_poly(tf, mode_gain(spec, k)));
}

DominantPoleSet dominant_poles(const model::RationalTransfer& tf,
                               const model::SpatialSpec& spec, double tol_dom) {
  if (tol_dom < 0.0) tol_dom = 1e-7 * tf.den.scale();
  DominantPoleSet dp;
  dp.tol_dom = tol_dom;

  std::vector<double> right(static_cast<std::size_t>(spec.k_max) + 1);
  std::vector<ComplexRootSet> roots(static_cast<std::size_t>(spec.k_max) + 1);
  double max_fin = -std::numeric_limits<double>::infinity();
  for (int k = 0; k <= spec.k_max; ++k) {
    roots[static_cast<std::size_t>(k)] =
        numerics::poly_roots(closed_loop_poly(tf, mode_gain(spec, k)));
    right[static_cast<std::size_t>(k)] = roots[static_cast<std::size_t>(k)].max_real();
    max_fin = std::max(max_fin, right[static_cast<std::size_t>(k)]);
  }
  const ComplexRootSet limit_roots = numerics::poly_roots(tf.num);
  const double beta = limit_roots.max_real();

  dp.max_real = std::max(max_fin, beta);
  if (dp.max_real < -tol_dom) return dp;  // no closed-right-half-plane pole

  if (max_fin >= dp.max_real - tol_dom) {
    for (int k = 0; k <= spec.k_max; ++k) {
      if (right[static_cast<std::size_t>(k)] >= max_fin - tol_dom) {
        dp.attained_at.push_back(k);
        append_unique(dp.poles,
                      rightmost_roots(roots[static_cast<std::size_t>(k)], tol_dom),
                      tol_dom);
      }
    }
  }
  if (beta >= dp.max_real - tol_dom) {
    dp.at_limit = true;
    append_unique(dp.poles, rightmost_roots(limit_roots, tol_dom), tol_dom);
  }
  return dp;
}

ScanResult lambda_scan(const model::RationalTransfer& tf, double lo, double hi,
                       int points) {
  ScanResult res;
  if (!(lo > 0.0)) lo = std::max(hi * 1e-12, 1e-300);
  if (!(hi > lo)) hi = lo * (1.0 + 1e-9);
  if (points < 2) points = 2;

  const double ratio = std::pow(hi / lo, 1.0 / double(points - 1));
  std::vector<double> lam(static_cast<std::size_t>(points)), r(static_cast<std::size_t>(points));
  double x = lo;
  int best = 0;
  for (int i = 0; i < points; ++i, x *= ratio) {
    lam[static_cast<std::size_t>(i)] = x;
    r[static_cast<std::size_t>(i)] = rightmost(tf, x);
    if (r[static_cast<std::size_t>(i)] > r[static_cast<std::size_t>(best)]) best = i;
  }
  res.max_rightmost = r[static_cast<std::size_t>(best)];
  res.lambda_at_max = lam[static_cast<std::size_t>(best)];

  // local refinement of the maximum (golden section on the bracketing pair)
  {
    double a = lam[static_cast<std::size_t>(std::max(0, best - 1))];
    double b = lam[static_cast<std::size_t>(std::min(points - 1, best + 1))];
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = rightmost(tf, x1), f2 = rightmost(tf, x2);
    for (int it = 0; it < 60 && (b - a) > 1e-12 * b; ++it) {
      if (f1 < f2) {
        a = x1; x1 = x2; f1 = f2;
        x2 = a + gr * (b - a); f2 = rightmost(tf, x2);
      } else {
        b = x2; x2 = x1; f2 = f1;
        x1 = b - gr * (b - a); f1 = rightmost(tf, x1);
      }
      const double fb = std::max(f1, f2), xb = (f1 > f2) ? x1 : x2;
      if (fb > res.max_rightmost) { res.max_rightmost = fb; res.lambda_at_max = xb; }
    }
  }

  // bisection on every sign change of the rightmost real part
  for (int i = 0; i + 1 < points; ++i) {
    double ra = r[static_cast<std::size_t>(i)], rb = r[static_cast<std::size_t>(i + 1)];
    if ((ra < 0.0) == (rb < 0.0)) continue;
    double a = lam[static_cast<std::size_t>(i)], b = lam[static_cast<std::size_t>(i + 1)];
    for (int it = 0; it < 80 && (b - a) > 1e-14 * b; ++it) {
      const double mid = 0.5 * (a + b);
      const double rm = rightmost(tf, mid);
      if ((rm < 0.0) == (ra < 0.0)) { a = mid; ra = rm; }
      else b = mid;
    }
    LocusSample s;
    s.lambda = 0.5 * (a + b);
    s.roots = numerics::poly_roots(closed_loop_poly(tf, s.lambda));
    res.crossings.push_back(std::move(s));
    if (res.crossings.back().roots.max_real() > res.max_rightmost) {
      res.max_rightmost = res.crossings.back().roots.max_real();
      res.lambda_at_max = res.crossings.back().lambda;
    }
  }
  return res;
}

Verdict classify(const model::LinearSystem& sys, const model::SpatialSpec& spec) {
  if (!sys.A.allFinite())
    throw std::invalid_argument("classify: system matrix has non-finite entries");
  const model::Partition part = model::partition(sys);
  const model::RationalTransfer tf = model::transfer_function(sys);
  const double tol_dom = default_tol_dom(sys);

  Verdict v;
  const bool dec = model::decoupled(part);
  v.degenerate = dec || !model::detect_cancellation(tf).empty();
  if (sys.n() == 3) v.condition_flags = three_species_conditions(sys);

  auto add_mode_sample = [&](int k) {
    LocusSample s;
    s.lambda = mode_gain(spec, k);
    s.roots = numerics::poly_roots(closed_loop_poly(tf, s.lambda));
    s.source_k = k;
    v.evidence.push_back(std::move(s));
  };
  add_mode_sample(0);  // spec(A)

  if (!numerics::is_hurwitz(tf.den)) {
    v.kind = Kind::NotTuring;
    return v;
  }

  DominantPoleSet dp = dominant_poles(tf, spec, tol_dom);

  ScanResult scan;
  bool have_scan = false;
  if (spec.mu > 0.0 && spec.k_max >= 1 && !dec) {
    const double lo = mode_gain(spec, 1);
    const double hi = std::max(mode_gain(spec, spec.k_max), 1e3 * sys.A.norm());
    scan = lambda_scan(tf, lo, hi);
    have_scan = true;
    for (const auto& c : scan.crossings) {
      if (v.evidence.size() >= 8) break;
      v.evidence.push_back(c);
    }
  }

  if (spec.lambda_policy == model::LambdaPolicy::Discrete || !have_scan) {
    if (dp.max_real >= -tol_dom) {
      v.kind = dp.attained_at.empty() ? Kind::TypeII : Kind::TypeI;
      for (int k : dp.attained_at)
        if (v.evidence.size() < 12 && k != 0) add_mode_sample(k);
    } else {
      v.kind = Kind::Stable;
      if (have_scan && scan.max_rightmost >= -tol_dom) v.near_instability = true;
    }
    v.dominant = std::move(dp);
    return v;
  }

  // Continuous policy: existence from the dense sweep; the critical gain is
  // mapped to the nearest discrete mode as evidence.
  const double beta = numerics::poly_roots(tf.num).max_real();
  const double m = std::max(scan.max_rightmost, beta);
  if (m < -tol_dom) {
    v.kind = Kind::Stable;
    v.dominant = std::move(dp);
    return v;
  }
  if (scan.max_rightmost >= beta - tol_dom) {
    v.kind = Kind::TypeI;
    DominantPoleSet cd;
    cd.tol_dom = tol_dom;
    cd.max_real = scan.max_rightmost;
    const ComplexRootSet at_max =
        numerics::poly_roots(closed_loop_poly(tf, scan.lambda_at_max));
    cd.poles = rightmost_roots(at_max, tol_dom);
    const int nearest = std::max(
        1, static_cast<int>(std::lround(
               spec.L / std::numbers::pi * std::sqrt(scan.lambda_at_max / spec.mu))));
    cd.attained_at.push_back(std::min(nearest, spec.k_max));
    cd.at_limit = beta >= scan.max_rightmost - tol_dom;
    LocusSample s;
    s.lambda = scan.lambda_at_max;
    s.roots = at_max;
    v.evidence.push_back(std::move(s));
    v.dominant = std::move(cd);
    return v;
  }
  v.kind = Kind::TypeII;
  DominantPoleSet cd;
  cd.tol_dom = tol_dom;
  cd.max_real = beta;
  cd.at_limit = true;
  const ComplexRootSet limit_roots = numerics::poly_roots(tf.num);
  cd.poles = rightmost_roots(limit_roots, tol_dom);
  v.dominant = std::move(cd);
  return v;
}

CriticalGain find_critical_gain(const model::LinearSystem& sys) {
  const model::RationalTransfer tf = model::transfer_function(sys);
  CriticalGain out;
  if (!numerics::is_hurwitz(tf.den)) return out;  // gate: A must be Hurwitz

  const bool block_hurwitz = numerics::is_hurwitz(tf.num);
  double shift = 0.0;
  if (!block_hurwitz) shift = numerics::poly_roots(tf.num).max_real();

  const Poly D = tf.den.shifted(shift);
  const Poly N = tf.num.shifted(shift);

  std::vector<double> dr, di, nr, ni;
  axis_parts(D, dr, di);
  axis_parts(N, nr, ni);

  // R(w) = Dr*Ni - Di*Nr vanishes exactly where -D(jw)/N(jw) is real.
  // R is odd in w; solve R(w)/w = 0 as a polynomial in u = w^2.
  std::vector<double> R = poly_mul(dr, ni);
  {
    const std::vector<double> t = poly_mul(di, nr);
    if (R.size() < t.size()) R.resize(t.size(), 0.0);
    const std::size_t off = R.size() - t.size();
    for (std::size_t i = 0; i < t.size(); ++i) R[off + i] -= t[i];
  }
  std::vector<double> omegas{0.0};
  {
    // extract coefficients of odd powers: R = sum r_{2t+1} w^{2t+1}
    const int degR = static_cast<int>(R.size()) - 1;
    std::vector<double> ru;  // highest degree in u first
    for (int e = degR; e >= 1; --e) {
      if (e % 2 == 1) ru.push_back(R[static_cast<std::size_t>(degR - e)]);
    }
    numerics::Poly rhat{std::vector<double>(ru)};
    if (!rhat.is_zero() && rhat.degree() >= 1) {
      for (const auto& u : numerics::poly_roots(rhat).roots) {
        if (std::abs(u.imag()) <= 1e-8 * (1.0 + std::abs(u)) && u.real() > 1e-30)
          omegas.push_back(std::sqrt(u.real()));
      }
    }
  }

  std::sort(omegas.begin(), omegas.end());
  for (double w : omegas) {
    const std::complex<double> jw(0.0, w);
    const std::complex<double> nv = N.eval(jw);
    const double nguard =
        1e-12 * N.scale() * std::pow(1.0 + std::abs(jw), N.degree());
    if (std::abs(nv) <= nguard) continue;  // zero of n on the line: no gain maps here
    const std::complex<double> q = -D.eval(jw) / nv;
    if (std::abs(q.imag()) > 1e-7 * (1.0 + std::abs(q))) continue;
    const double lambda = q.real();
    if (!(lambda > 0.0)) continue;
    const Poly cl = closed_loop_poly(tf, lambda);
    const std::complex<double> s(shift, w);
    const double resid = std::abs(cl.eval(s));
    if (resid > 1e-6 * cl.scale() * std::pow(1.0 + std::abs(s), cl.degree())) continue;
    if (!out.found || lambda < out.lambda) {
      out.found = true;
      out.axis = block_hurwitz ? CrossingAxis::imaginary : CrossingAxis::shifted;
      out.lambda = lambda;
      out.s = s;
    }
  }
  return out;
}

CubicFlags three_species_conditions(const model::LinearSystem& sys) {
  if (sys.n() != 3)
    throw std::invalid_argument("three_species_conditions requires n = 3");
  const model::RationalTransfer tf = model::transfer_function(sys);
  const double a2 = tf.den.c[1], a1 = tf.den.c[2], a0 = tf.den.c[3];
  const double t1 = tf.num.c[1], t0 = tf.num.c[2];

  CubicFlags f;
  f.I = a2 > 0.0 && a1 * a2 - a0 > 0.0 && a0 > 0.0;
  if (t1 > 0.0 && t0 > 0.0) {
    const double arg = t1 * (a1 * a2 - a0);
    // a negative radicand cannot satisfy the inequality (no real bound)
    f.II_A = arg >= 0.0 && a1 + t1 * a2 - t0 <= -2.0 * std::sqrt(arg);
  }
  f.II_B = t1 <= 0.0 && t1 * t1 - 4.0 * t0 < 0.0 &&
           -t1 * t1 + t0 + t1 * a2 - a1 > 0.0;
  return f;
}

bool two_species_never_type1(const model::LinearSystem& sys) {
  if (sys.n() != 2)
    throw std::invalid_argument("two_species_never_type1 requires n = 2");
  const model::RationalTransfer tf = model::transfer_function(sys);
  if (!numerics::is_hurwitz(tf.den))
    throw std::invalid_argument("two_species_never_type1 requires Hurwitz A");
  model::SpatialSpec sp;
  sp.mu = 1e-6;  // pushes the sweep's lower gain bound near zero
  sp.L = 1.0;
  sp.k_max = 200;
  sp.lambda_policy = model::LambdaPolicy::Continuous;
  return classify(sys, sp).kind != Kind::TypeI;
}

bool dominant_pair_oscillatory(const Verdict& verdict) {
  if (verdict.kind != Kind::TypeI)
    throw std::invalid_argument("dominant_pair_oscillatory requires a TypeI verdict");
  if (!verdict.dominant || verdict.dominant->poles.empty()) return false;
  for (const auto& p : verdict.dominant->poles)
    if (std::abs(p.imag()) <= verdict.dominant->tol_dom) return false;
  return true;
}

}  // namespace turing1::classify

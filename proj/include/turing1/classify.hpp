#pragma once

#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "turing1/model.hpp"

// Verdict machinery for diffusion-driven instability of a single-diffuser
// system. A system with Hurwitz A is Turing unstable when some closed-loop
// subsystem p(lambda_k, s) = d(s) + lambda_k n(s) has a root in the closed
// right half-plane, k running over the discrete Neumann modes plus the
// k->infinity limit (where the bounded locus branches terminate at the zeros
// of n). The verdict separates finite-mode attainment (TypeI: a finite-
// wavelength pattern) from limit-only attainment (TypeII: arbitrarily fine
// structure, biologically implausible).

namespace turing1::classify {

enum class Kind { Stable, NotTuring, TypeI, TypeII };
const char* kind_name(Kind k);

// Closed-form inequality flags for the 3-species case, computed from the
// characteristic coefficients alpha2, alpha1, alpha0 of A and
// alphat1, alphat0 of the non-diffuser block Atilde:
//   I    <=>  alpha2 > 0  and  alpha1*alpha2 - alpha0 > 0  and  alpha0 > 0
//   II_A <=>  alphat1 > 0 and alphat0 > 0 and
//             alpha1 + alphat1*alpha2 - alphat0
//                 <= -2*sqrt(alphat1*(alpha1*alpha2 - alpha0))
//   II_B <=>  alphat1 <= 0 and alphat1^2 - 4*alphat0 < 0 and
//             -alphat1^2 + alphat0 + alphat1*alpha2 - alpha1 > 0
// TypeI existence  <=>  I and (II_A or II_B); equivalent to the locus search
// in find_critical_gain (property-tested).
struct CubicFlags {
  bool I = false;
  bool II_A = false;
  bool II_B = false;
  bool type1() const { return I && (II_A || II_B); }
};

struct DominantPoleSet {
  std::vector<std::complex<double>> poles;  // rightmost closed-RHP poles
  std::vector<int> attained_at;             // finite modes achieving max_real
  bool at_limit = false;                    // k->infinity value ties or leads
  double max_real = -std::numeric_limits<double>::infinity();
  double tol_dom = 0.0;                     // tie/threshold tolerance used
};

struct LocusSample {
  double lambda = 0.0;
  numerics::ComplexRootSet roots;
  int source_k = -1;  // >= 0 when lambda equals a discrete mode gain
};

struct Verdict {
  Kind kind = Kind::Stable;
  std::optional<DominantPoleSet> dominant;
  std::optional<CubicFlags> condition_flags;  // present when n == 3
  bool degenerate = false;        // pole-zero cancellation or decoupled diffuser
  bool near_instability = false;  // continuous-gain instability with no discrete
                                  // mode attaining it (Discrete policy only)
  std::vector<LocusSample> evidence;
};

// tol_dom default: 1e-7 * (1 + ||A||_F).
double default_tol_dom(const model::LinearSystem& sys);

// Roots of p(lambda_k, s). Throws std::out_of_range for k > k_max.
numerics::ComplexRootSet subsystem_poles(const model::RationalTransfer& tf,
                                         const model::SpatialSpec& spec, int k);

// Discrete-mode dominance: the rightmost real part over k in {0..k_max} and
// the k->infinity terminal value beta = max Re of the zeros of n(s). Poles
// are populated only when the winner reaches the closed right half-plane
// (within tol_dom); ties within tol_dom include both sources. When tol_dom
// is negative, a proxy based on the denominator coefficient scale is used.
DominantPoleSet dominant_poles(const model::RationalTransfer& tf,
                               const model::SpatialSpec& spec,
                               double tol_dom = -1.0);

// Dense gain sweep over [lo, hi] (geometric grid) used for existence checks:
// tracks the maximal rightmost root real part, refines the maximum locally,
// and bisects every sign change of the rightmost real part to bracket axis
// crossings.
struct ScanResult {
  double max_rightmost = -std::numeric_limits<double>::infinity();
  double lambda_at_max = 0.0;
  std::vector<LocusSample> crossings;
};
ScanResult lambda_scan(const model::RationalTransfer& tf, double lo, double hi,
                       int points = 2000);

// Full verdict. NotTuring when A itself is unstable; otherwise Stable /
// TypeI / TypeII per the dominance rules. Under LambdaPolicy::Discrete the
// verdict is decided on the discrete modes and the continuous sweep only
// feeds the near_instability note; under Continuous the sweep decides
// existence and the critical gain is mapped back to the nearest mode index.
Verdict classify(const model::LinearSystem& sys, const model::SpatialSpec& spec);

// Witness search for a finite positive gain whose closed-loop root lies on
// the critical vertical line: the imaginary axis when the non-diffuser block
// is Hurwitz, else the line Re(s) = beta through the rightmost zeros of n.
// Such a witness exists precisely when the system can be TypeI unstable
// (given Hurwitz A); found is always false when A is not Hurwitz.
enum class CrossingAxis { none, imaginary, shifted };
struct CriticalGain {
  bool found = false;
  CrossingAxis axis = CrossingAxis::none;
  double lambda = 0.0;            // witness gain, > 0 when found
  std::complex<double> s;         // witness root location
};
CriticalGain find_critical_gain(const model::LinearSystem& sys);

// Closed-form flags (n == 3 only; throws std::invalid_argument otherwise).
CubicFlags three_species_conditions(const model::LinearSystem& sys);

// Named property for 2-species systems: a Hurwitz planar system is never
// TypeI under a dense gain scan. Throws unless n == 2 and A is Hurwitz.
bool two_species_never_type1(const model::LinearSystem& sys);

// Oscillation check: every dominant pole of a TypeI verdict has a nonzero
// imaginary part (|Im| > tol_dom). Throws unless verdict.kind == TypeI.
bool dominant_pair_oscillatory(const Verdict& verdict);

}  // namespace turing1::classify

#pragma once

#include <array>
#include <vector>

#include "turing1/classify.hpp"

// Extended Gray-Scott chemistry: X + 2Y <=> 3Y (reverse rate eta1),
// Y <=> Z (rates k and k*eta2), feed/degradation gamma, with Z the only
// diffusing species:
//   dx/dt = -x y^2 + eta1 y^3 + gamma (1 - x)
//   dy/dt =  x y^2 - eta1 y^3 - k (y - eta2 z) - gamma y
//   dz/dt =  k (y - eta2 z) - gamma z + mu lap z
// Summing the three lines gives the closed identity
// d(x+y+z)/dt = gamma (1 - x - y - z) away from diffusion.

namespace turing1::grayscott {

struct GSParams {
  double gamma = 1e-2;   // feed / degradation rate
  double k_rate = 6.2e-2;  // Y <-> Z interconversion rate
  double eta1 = 0.1;     // normalized reverse autocatalysis rate
  double eta2 = 0.1;     // normalized reverse interconversion rate
  double mu = 1e-3;      // diffusion coefficient of Z
};

enum class Branch { Zero, Plus, Minus };
const char* branch_name(Branch b);

struct GSEquilibrium {
  Branch branch = Branch::Zero;
  double x = 1.0, y = 0.0, z = 0.0;
  bool physical = true;  // all concentrations nonnegative
};

// Reaction part only (diffusion handled by the PDE integrator).
std::array<double, 3> rhs(const GSParams& p, double x, double y, double z);

double v_rate(const GSParams& p);  // v = gamma + k*eta2
double w_disc(const GSParams& p);  // w = v^2 - 4 gamma (k+v)((1+eta1) v + k)
double rhs_residual(const GSParams& p, const GSEquilibrium& eq);  // max |rhs|

// Homogeneous equilibria: the trivial branch (1,0,0) always, plus the two
// interior branches y_pm = (v +- sqrt(w)) / (2((1+eta1)v + k)) when w >= 0,
// with z = k y / v and x = (eta1 y^3 + gamma)/(y^2 + gamma). Branches with a
// negative concentration are returned with physical = false. Throws
// std::invalid_argument when v = 0 (gamma = k*eta2 = 0: x is indeterminate).
std::vector<GSEquilibrium> equilibria(const GSParams& p);

// Reaction Jacobian at an equilibrium (residual-checked, tol 1e-10):
//   [ -y^2-gamma        -2xy+3*eta1*y^2      0          ]
//   [  y^2               2xy-3*eta1*y^2-k-gamma  k*eta2 ]
//   [  0                 k                   -k*eta2-gamma ]
Eigen::Matrix3d jacobian_at(const GSParams& p, const GSEquilibrium& eq);

// (gamma, k) plane sweep for TypeI capability of the Plus branch.
enum class CellStatus { TypeI, notTypeI, noEquilibrium };
const char* status_name(CellStatus s);

struct SweepCell {
  double gamma = 0.0, k_rate = 0.0;
  CellStatus status = CellStatus::noEquilibrium;
  bool nonphysical = false;  // Plus branch exists but has a negative entry
  bool have_alphas = false;
  double alpha2 = 0, alpha1 = 0, alpha0 = 0;    // char coefficients of A
  double alphat1 = 0, alphat0 = 0;              // char coefficients of Atilde
  classify::CubicFlags flags;
};

struct SweepResult {
  int n_gamma = 0, n_k = 0;
  std::vector<double> gammas, ks;
  std::vector<SweepCell> cells;  // row-major: index = i_gamma * n_k + j_k
  int verify_checked = 0, verify_mismatch = 0;

  const SweepCell& at(int i_gamma, int j_k) const {
    return cells[static_cast<std::size_t>(i_gamma) * static_cast<std::size_t>(n_k) +
                 static_cast<std::size_t>(j_k)];
  }
};

// Each cell evaluates the Plus equilibrium and the closed-form flags; cells
// run in parallel with deterministic output ordering. verify_fraction > 0
// re-checks that share of TypeI cells against a dense gain scan and counts
// disagreements (expected zero).
SweepResult region_sweep(double gamma_lo, double gamma_hi, double k_lo, double k_hi,
                         int n_gamma, int n_k, double eta1, double eta2,
                         double mu, double L, double verify_fraction = 0.0,
                         unsigned seed = 12345);

// Topology of the TypeI cell set under 4-neighbor adjacency.
struct RegionTopology {
  int cells = 0;
  bool nonempty = false;
  bool connected = false;        // exactly one component
  bool simply_connected = false; // connected and no enclosed holes
};
RegionTopology region_topology(const SweepResult& sweep);

}  // namespace turing1::grayscott

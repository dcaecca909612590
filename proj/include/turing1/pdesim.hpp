#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "turing1/grayscott.hpp"

// 1-D method-of-lines simulator on [0, L] with Neumann (zero-flux) walls.
// Space: second-order central differences with ghost-point closure
// (u_{-1} = u_1, u_N = u_{N-2}); only the LAST species diffuses. Time:
// adaptive embedded Runge-Kutta 4(5) by default, or fixed-step classic RK4,
// both behind the TimeStepper interface. Cosine-mode spectra identify the
// dominant emergent spatial mode and its growth rate.

namespace turing1::pdesim {

struct Divergence : std::runtime_error {
  double t;
  explicit Divergence(double time)
      : std::runtime_error("solution diverged (|value| > 1e12) at t = " +
                           std::to_string(time)),
        t(time) {}
};

struct InitialCondition {
  enum class Kind {
    Equilibrium,  // homogeneous base state, no perturbation
    MultiMode,    // base + sum_{j=1..20} 0.01 cos(j pi xi / L) on every species
    SingleMode,   // base + amplitude * cos(mode pi xi / L) on every species
  };
  Kind kind = Kind::MultiMode;
  int mode = 1;
  double amplitude = 0.01;
};

struct SimConfig {
  int N = 128;        // grid points, >= 16
  double L = 1.0;     // domain length
  double T = 5000.0;  // final time
  bool adaptive = true;
  double dt = 0.0;           // fixed step when adaptive = false
  double rtol = 1e-8, atol = 1e-11;
  double mu = 1e-3;          // diffusion coefficient of the last species
  double snapshot_every = 10.0;
  int k_spec = 64;           // spectra recorded for k = 0..k_spec
  InitialCondition ic;
};

// Reaction part of the dynamics: reads/writes species-major blocks of N.
using ReactionFn = std::function<void(const double* state, double* deriv, int N)>;

struct Trajectory {
  int N = 0, n_species = 0, k_spec = 0;
  double L = 1.0;
  std::vector<double> times;
  // per snapshot: species-major field values (n_species * N)
  std::vector<std::vector<double>> fields;
  // per snapshot: species-major cosine coefficients (n_species * (k_spec+1))
  std::vector<std::vector<double>> spectra;
};

// Integrates d(state)/dt = reaction(state) + diffusion(last species).
// base holds the homogeneous base value per species; the initial condition
// adds the configured perturbation to it. Throws std::invalid_argument for
// bad configuration (including a fixed dt above the diffusion stability
// bound 0.4 h^2 / mu) and Divergence on blow-up.
Trajectory simulate(const ReactionFn& reaction, int n_species,
                    const std::vector<double>& base, const SimConfig& cfg);

// Type-I discrete cosine coefficients (trapezoid-weighted) normalized so
// field_i = sum_k coeff_k cos(pi k i / (N-1)) exactly; K is clamped to N-1.
std::vector<double> mode_spectrum(const double* field, int N, int K);
// Evaluates the expansion back onto the grid (test/inversion helper).
std::vector<double> mode_reconstruct(const std::vector<double>& coeffs, int N);

struct DominantMode {
  bool no_pattern = false;  // every mode k >= 1 stayed below the noise floor
  int k_star = 0;
  double growth_rate = 0.0;  // least-squares slope of log amplitude before saturation
  bool saturated = false;
  double window_lo = 0.0, window_hi = 0.0;
};

// k_star maximizes the window-averaged cross-species amplitude
// sqrt(sum_s coeff_{s,k}^2) over k >= 1; the growth rate is fit on the early
// (pre-saturation) part of the full series. Saturation = local slope falling
// below 10% of the early slope. Noise floor: 1e-14.
DominantMode dominant_mode(const Trajectory& traj, double window_lo, double window_hi);

// Reaction adapters.
ReactionFn grayscott_reaction(const grayscott::GSParams& p);
ReactionFn linear_reaction(const Eigen::MatrixXd& A);  // deviation variables

// Output writers (CSV: "%.17g" floats).
// Trajectory CSV columns: time, xi, one column per species.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
// Binary block format (little-endian): int64 N, n_species, n_times; then
// n_times float64 snapshot times; then per snapshot the species-major field
// values, row-major as (species, grid point).
void write_trajectory_bin(const Trajectory& traj, const std::string& path);
// Spectra CSV columns: time, k, species, coefficient.
void write_spectra_csv(const Trajectory& traj, const std::string& path);

}  // namespace turing1::pdesim

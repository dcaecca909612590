#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "turing1/numerics.hpp"

// Linearized single-diffuser reaction-diffusion system: the Jacobian A with
// the diffusing species in the LAST position, its block partition, the local
// transfer function h(s) = n(s)/d(s) with n = det(sI - Atilde) and
// d = det(sI - A), the closed-loop family p(lambda, s) = d + lambda*n, and
// the Neumann modal gains lambda_k = mu*(k*pi/L)^2.

namespace turing1::model {

struct LinearSystem {
  Eigen::MatrixXd A;  // n x n, diffuser is species n (last row/column)

  int n() const { return static_cast<int>(A.rows()); }
};

// Block partition of A: top-left (n-1)x(n-1) couples the non-diffusing
// species; b and c are the couplings into/out of the diffuser; d is the
// diffuser's self term. Blocks tile A exactly.
struct Partition {
  Eigen::MatrixXd At;   // "A tilde"
  Eigen::VectorXd b;    // last column, first n-1 entries
  Eigen::RowVectorXd c; // last row, first n-1 entries
  double d = 0.0;       // corner
};

struct RationalTransfer {
  numerics::Poly num;  // det(sI - Atilde), degree n-1, monic
  numerics::Poly den;  // det(sI - A),      degree n,   monic
};

enum class LambdaPolicy { Discrete, Continuous };

struct SpatialSpec {
  double mu = 1e-3;  // diffusion coefficient of the last species, >= 0
  double L = 1.0;    // domain length, > 0
  int k_max = 200;   // largest discrete mode index evaluated
  LambdaPolicy lambda_policy = LambdaPolicy::Discrete;
};

// Throws std::invalid_argument when n < 2.
Partition partition(const LinearSystem& sys);

// num = char_poly(Atilde), den = char_poly(A). The pair equals the resolvent
// corner e_n^T (sI - A)^{-1} e_n by the adjugate identity (property-tested).
RationalTransfer transfer_function(const LinearSystem& sys);

// Coefficient-wise d + lambda*n with tail alignment. lambda < 0 throws.
numerics::Poly closed_loop_poly(const RationalTransfer& tf, double lambda);

// lambda_k = mu * (k*pi/L)^2; k < 0 throws.
double mode_gain(const SpatialSpec& spec, int k);

// Shared roots of num and den: values r where both |n(r)| and |d(r)| fall
// below tol_root * scale * (1+|r|)^degree. A nonempty result means a pole-
// zero cancellation; downstream verdicts carry a degenerate flag for it.
std::vector<std::complex<double>> detect_cancellation(
    const RationalTransfer& tf, const numerics::Tolerances& tol = {});

// True when both off-diagonal couplings b and c are exactly zero: the
// diffuser is decoupled and every closed-loop subsystem shares spec(Atilde).
bool decoupled(const Partition& part);

// JSON model file ingestion. Schema:
//   { "A": [[...], ...],            required, square, n >= 2
//     "diffuser_index": int,        optional, 0-based, default n-1; the
//                                   marked species is reordered to be last
//     "mu": float,                  required, >= 0
//     "L": float,                   required, > 0
//     "k_max": int,                 optional, default 200
//     "lambda_policy": "discrete" | "continuous"   optional }
// Throws std::invalid_argument with a field-level message on bad input.
struct ModelInput {
  LinearSystem sys;
  SpatialSpec spec;
};
ModelInput load_model(const std::string& path);
ModelInput parse_model(const std::string& json_text);

}  // namespace turing1::model

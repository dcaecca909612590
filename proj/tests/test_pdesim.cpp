#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "turing1/classify.hpp"
#include "turing1/pdesim.hpp"

using namespace turing1;
using oracles::uniform;

namespace {

grayscott::GSParams params_a() {
  grayscott::GSParams p;
  p.gamma = 1e-2;
  p.k_rate = 6.2e-2;
  return p;
}

grayscott::GSEquilibrium plus_eq(const grayscott::GSParams& p) {
  for (const auto& eq : grayscott::equilibria(p))
    if (eq.branch == grayscott::Branch::Plus) return eq;
  FAIL("Plus branch missing");
  return {};
}

// exp(A t) v through the (complex) eigendecomposition; assumes diagonalizable
Eigen::VectorXd expm_times(const Eigen::MatrixXd& A, double t, const Eigen::VectorXd& v) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  const Eigen::MatrixXcd V = es.eigenvectors();
  const Eigen::VectorXcd lam = es.eigenvalues();
  const Eigen::VectorXcd coef = V.fullPivLu().solve(v.cast<std::complex<double>>());
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
  for (int i = 0; i < v.size(); ++i)
    out += coef(i) * std::exp(lam(i) * t) * V.col(i);
  return out.real();
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("pdesim") {

TEST_CASE("homogeneous equilibrium is a fixed point of the full scheme") {
  const auto p = params_a();
  const auto eq = plus_eq(p);
  pdesim::SimConfig cfg;
  cfg.N = 32;
  cfg.T = 200.0;
  cfg.snapshot_every = 50.0;
  cfg.mu = p.mu;
  cfg.ic.kind = pdesim::InitialCondition::Kind::Equilibrium;
  const auto traj =
      pdesim::simulate(pdesim::grayscott_reaction(p), 3, {eq.x, eq.y, eq.z}, cfg);
  REQUIRE(traj.times.size() >= 2);
  for (const auto& f : traj.fields) {
    for (int i = 0; i < cfg.N; ++i) {
      CHECK(std::abs(f[std::size_t(i)] - eq.x) <= 1e-10);
      CHECK(std::abs(f[std::size_t(cfg.N + i)] - eq.y) <= 1e-10);
      CHECK(std::abs(f[std::size_t(2 * cfg.N + i)] - eq.z) <= 1e-10);
    }
  }
  // and the mode detector reports no pattern on it
  const auto dm = pdesim::dominant_mode(traj, 0.0, cfg.T);
  CHECK(dm.no_pattern);
}

TEST_CASE("mu = 0 reduces every grid point to the reaction ODE") {
  const Eigen::Matrix3d A = grayscott::jacobian_at(params_a(), plus_eq(params_a()));
  pdesim::SimConfig cfg;
  cfg.N = 16;
  cfg.T = 400.0;
  cfg.snapshot_every = 100.0;
  cfg.mu = 0.0;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-13;
  cfg.ic.kind = pdesim::InitialCondition::Kind::SingleMode;
  cfg.ic.mode = 3;
  cfg.ic.amplitude = 0.01;
  const auto traj = pdesim::simulate(pdesim::linear_reaction(A), 3, {0, 0, 0}, cfg);

  const Eigen::Vector3d ones(1.0, 1.0, 1.0);
  for (std::size_t it = 0; it < traj.times.size(); ++it) {
    const Eigen::Vector3d prop = expm_times(A, traj.times[it], ones);
    for (int i = 0; i < cfg.N; ++i) {
      const double phase =
          0.01 * std::cos(3.0 * M_PI * double(i) / double(cfg.N - 1));
      for (int s = 0; s < 3; ++s) {
        const double expect = phase * prop(s);
        const double got = traj.fields[it][std::size_t(s * cfg.N + i)];
        CHECK(std::abs(got - expect) <= 1e-8 * (1.0 + std::abs(expect)));
      }
    }
  }
}

TEST_CASE("cosine transform: constants, pure modes, and exact inversion") {
  const int N = 65;
  std::vector<double> constant(N, 3.25);
  const auto c0 = pdesim::mode_spectrum(constant.data(), N, N - 1);
  REQUIRE(c0.size() == std::size_t(N));
  CHECK(c0[0] == doctest::Approx(3.25).epsilon(1e-13));
  for (std::size_t k = 1; k < c0.size(); ++k) CHECK(std::abs(c0[k]) <= 1e-12);

  std::vector<double> pure(N);
  for (int i = 0; i < N; ++i) pure[std::size_t(i)] = std::cos(7.0 * M_PI * i / (N - 1));
  const auto c7 = pdesim::mode_spectrum(pure.data(), N, N - 1);
  CHECK(c7[7] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t k = 0; k < c7.size(); ++k)
    if (k != 7) CHECK(std::abs(c7[k]) <= 1e-10);  // leakage bound

  std::mt19937_64 rng(94);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> f(N);
    for (auto& x : f) x = uniform(rng, -1.0, 1.0);
    const auto coef = pdesim::mode_spectrum(f.data(), N, N - 1);
    const auto back = pdesim::mode_reconstruct(coef, N);
    CHECK(max_abs_diff(f, back) <= 1e-8);  // round-trip contract
  }

  // K above N-1 clamps instead of reading out of range
  const auto clamped = pdesim::mode_spectrum(pure.data(), N, N + 40);
  CHECK(clamped.size() == std::size_t(N));
}

TEST_CASE("boundary derivative stays flat through a stable run") {
  // set B: every spatial mode decays, so the perturbed field relaxes back to
  // the homogeneous state and the walls stay derivative-free throughout
  auto p = params_a();
  p.k_rate = 5.5e-2;
  const auto eq = plus_eq(p);
  pdesim::SimConfig cfg;
  // N chosen so the one-sided estimator's own h^3 truncation on the seeded
  // cosine sits well under the bound; a stencil bug would exceed it by
  // orders of magnitude
  cfg.N = 128;
  cfg.T = 200.0;
  cfg.snapshot_every = 10.0;
  cfg.mu = p.mu;
  cfg.rtol = 1e-9;
  cfg.atol = 1e-12;
  cfg.ic.kind = pdesim::InitialCondition::Kind::SingleMode;
  cfg.ic.mode = 1;
  cfg.ic.amplitude = 1e-3;
  const auto traj =
      pdesim::simulate(pdesim::grayscott_reaction(p), 3, {eq.x, eq.y, eq.z}, cfg);
  const double h = cfg.L / double(cfg.N - 1);
  for (const auto& f : traj.fields) {
    for (int s = 0; s < 3; ++s) {
      const double* u = f.data() + std::size_t(s) * std::size_t(cfg.N);
      double scale = 0.0;
      for (int i = 0; i < cfg.N; ++i) scale = std::max(scale, std::abs(u[i]));
      // one-sided second-order derivative estimates at both walls
      const double d0 = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
      const double d1 =
          (3.0 * u[cfg.N - 1] - 4.0 * u[cfg.N - 2] + u[cfg.N - 3]) / (2.0 * h);
      CHECK(std::abs(d0) <= 1e-6 * (scale + 1e-30));
      CHECK(std::abs(d1) <= 1e-6 * (scale + 1e-30));
    }
  }
}

TEST_CASE("linearized growth rates track the subsystem poles within 5%") {
  const Eigen::Matrix3d A = grayscott::jacobian_at(params_a(), plus_eq(params_a()));
  const auto tf = model::transfer_function(model::LinearSystem{A});
  model::SpatialSpec spec;  // mu = 1e-3, L = 1

  for (int k = 1; k <= 3; ++k) {
    const double sigma =
        numerics::poly_roots(model::closed_loop_poly(tf, model::mode_gain(spec, k)))
            .max_real();
    pdesim::SimConfig cfg;
    cfg.N = 128;
    cfg.T = 3000.0;
    cfg.snapshot_every = 10.0;
    cfg.mu = spec.mu;
    cfg.rtol = 1e-9;
    cfg.atol = 1e-12;
    cfg.ic.kind = pdesim::InitialCondition::Kind::SingleMode;
    cfg.ic.mode = k;
    cfg.ic.amplitude = 1e-4;
    const auto traj = pdesim::simulate(pdesim::linear_reaction(A), 3, {0, 0, 0}, cfg);
    const auto dm = pdesim::dominant_mode(traj, 0.75 * cfg.T, cfg.T);
    REQUIRE(!dm.no_pattern);
    CHECK(dm.k_star == k);
    CHECK(std::abs(dm.growth_rate - sigma) <= 0.05 * std::abs(sigma));
  }
}

TEST_CASE("spatial refinement: second-order error contraction on pure diffusion") {
  // single species, zero reaction: u_t = mu u_xx with a mode-4 start has the
  // exact solution exp(-mu (4 pi / L)^2 t) cos(4 pi xi / L)
  const double mu = 1e-3, T = 10.0, L = 1.0;
  auto run_error = [&](int N) {
    pdesim::SimConfig cfg;
    cfg.N = N;
    cfg.L = L;
    cfg.T = T;
    cfg.snapshot_every = T;
    cfg.mu = mu;
    cfg.rtol = 1e-11;
    cfg.atol = 1e-14;
    cfg.ic.kind = pdesim::InitialCondition::Kind::SingleMode;
    cfg.ic.mode = 4;
    cfg.ic.amplitude = 1.0;
    const auto traj = pdesim::simulate(
        pdesim::linear_reaction(Eigen::MatrixXd::Zero(1, 1)), 1, {0.0}, cfg);
    const auto& last = traj.fields.back();
    const double decay = std::exp(-mu * std::pow(4.0 * M_PI / L, 2) * T);
    double err = 0.0;
    for (int i = 0; i < N; ++i) {
      const double exact = decay * std::cos(4.0 * M_PI * (double(i) / (N - 1)) / L);
      err = std::max(err, std::abs(last[std::size_t(i)] - exact));
    }
    return err;
  };
  const double e_coarse = run_error(33), e_fine = run_error(65);
  CHECK(e_coarse > e_fine);
  const double ratio = e_coarse / e_fine;
  CHECK(ratio > 3.3);
  CHECK(ratio < 4.7);
}

TEST_CASE("adaptive and fixed steppers agree on a smooth problem") {
  const Eigen::Matrix3d A = grayscott::jacobian_at(params_a(), plus_eq(params_a()));
  pdesim::SimConfig cfg;
  cfg.N = 32;
  cfg.T = 100.0;
  cfg.snapshot_every = 25.0;
  cfg.mu = 1e-3;
  cfg.ic.kind = pdesim::InitialCondition::Kind::SingleMode;
  cfg.ic.mode = 2;
  cfg.ic.amplitude = 0.01;
  const auto adaptive = pdesim::simulate(pdesim::linear_reaction(A), 3, {0, 0, 0}, cfg);

  cfg.adaptive = false;
  cfg.dt = 0.02;
  const auto fixed = pdesim::simulate(pdesim::linear_reaction(A), 3, {0, 0, 0}, cfg);
  REQUIRE(adaptive.times.size() == fixed.times.size());
  CHECK(max_abs_diff(adaptive.fields.back(), fixed.fields.back()) <= 1e-8);
}

TEST_CASE("snapshot cadence: start, multiples, exact final time") {
  pdesim::SimConfig cfg;
  cfg.N = 16;
  cfg.T = 25.0;
  cfg.snapshot_every = 10.0;
  cfg.mu = 0.0;
  cfg.ic.kind = pdesim::InitialCondition::Kind::Equilibrium;
  const auto traj = pdesim::simulate(
      pdesim::linear_reaction(Eigen::MatrixXd::Identity(1, 1) * -0.1), 1, {0.0}, cfg);
  REQUIRE(traj.times.size() == 4);
  CHECK(traj.times[0] == 0.0);
  CHECK(traj.times[1] == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(traj.times[2] == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(traj.times[3] == doctest::Approx(25.0).epsilon(1e-12));
}

TEST_CASE("configuration validation") {
  const auto rhs = pdesim::linear_reaction(Eigen::MatrixXd::Identity(2, 2) * -1.0);
  pdesim::SimConfig cfg;

  cfg.N = 8;  // below the minimum grid
  CHECK_THROWS_AS(pdesim::simulate(rhs, 2, {0.0, 0.0}, cfg), std::invalid_argument);
  cfg.N = 32;

  CHECK_THROWS_AS(pdesim::simulate(rhs, 2, {0.0}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(pdesim::simulate(rhs, 0, {}, cfg), std::invalid_argument);

  cfg.T = -1.0;
  CHECK_THROWS_AS(pdesim::simulate(rhs, 2, {0.0, 0.0}, cfg), std::invalid_argument);
  cfg.T = 10.0;

  cfg.snapshot_every = 0.0;
  CHECK_THROWS_AS(pdesim::simulate(rhs, 2, {0.0, 0.0}, cfg), std::invalid_argument);
  cfg.snapshot_every = 5.0;

  cfg.rtol = -1.0;
  CHECK_THROWS_AS(pdesim::simulate(rhs, 2, {0.0, 0.0}, cfg), std::invalid_argument);
  cfg.rtol = 1e-8;

  // fixed step above the diffusion stability bound 0.4 h^2 / mu
  cfg.adaptive = false;
  cfg.mu = 1e-3;
  const double h = cfg.L / double(cfg.N - 1);
  cfg.dt = 0.5 * h * h / cfg.mu;
  CHECK_THROWS_AS(pdesim::simulate(rhs, 2, {0.0, 0.0}, cfg), std::invalid_argument);
  cfg.dt = 0.3 * h * h / cfg.mu;
  CHECK_NOTHROW(pdesim::simulate(rhs, 2, {0.0, 0.0}, cfg));
  cfg.dt = 0.0;
  CHECK_THROWS_AS(pdesim::simulate(rhs, 2, {0.0, 0.0}, cfg), std::invalid_argument);
}

TEST_CASE("blow-up raises a divergence error carrying the failure time") {
  pdesim::SimConfig cfg;
  cfg.N = 16;
  cfg.T = 50.0;
  cfg.snapshot_every = 10.0;
  cfg.mu = 0.0;
  cfg.ic.kind = pdesim::InitialCondition::Kind::SingleMode;
  cfg.ic.mode = 1;
  cfg.ic.amplitude = 1.0;
  const auto rhs = pdesim::linear_reaction(Eigen::MatrixXd::Identity(2, 2) * 2.0);
  try {
    pdesim::simulate(rhs, 2, {0.0, 0.0}, cfg);
    FAIL("expected Divergence");
  } catch (const pdesim::Divergence& d) {
    CHECK(d.t > 0.0);
    CHECK(d.t <= 50.0);
    // |v| reaches 1e12 from 1 at rate 2: t ~ ln(1e12)/2 = 13.8
    CHECK(d.t == doctest::Approx(13.8).epsilon(0.1));
  }
}

TEST_CASE("dominant mode on synthetic spectra: growth, saturation, silence") {
  auto make_traj = [](const std::function<double(double, int)>& coef) {
    pdesim::Trajectory t;
    t.N = 32;
    t.n_species = 1;
    t.k_spec = 8;
    for (int i = 0; i <= 100; ++i) {
      const double tm = double(i);
      t.times.push_back(tm);
      std::vector<double> sp(9, 0.0);
      for (int k = 0; k <= 8; ++k) sp[std::size_t(k)] = coef(tm, k);
      t.spectra.push_back(std::move(sp));
      t.fields.emplace_back();  // unused by dominant_mode
    }
    return t;
  };

  // clean exponential growth of mode 3, decay of mode 1; mode 3 must own
  // the trailing window mean, not just the final sample
  const auto growing = make_traj([](double t, int k) {
    if (k == 3) return 1e-4 * std::exp(0.05 * t);
    if (k == 1) return 1e-3 * std::exp(-0.02 * t);
    return 0.0;
  });
  const auto g = pdesim::dominant_mode(growing, 50.0, 100.0);
  CHECK(!g.no_pattern);
  CHECK(g.k_star == 3);
  CHECK(g.growth_rate == doctest::Approx(0.05).epsilon(0.02));
  CHECK(!g.saturated);

  // growth that flattens: saturation detected, rate fit on the early part
  const auto sat = make_traj([](double t, int k) {
    if (k != 2) return 0.0;
    return 1e-4 * std::exp(0.08 * std::min(t, 40.0));
  });
  const auto s = pdesim::dominant_mode(sat, 50.0, 100.0);
  CHECK(s.k_star == 2);
  CHECK(s.saturated);
  CHECK(s.growth_rate == doctest::Approx(0.08).epsilon(0.05));

  // everything at rounding level: silence
  const auto quiet = make_traj([](double, int) { return 1e-16; });
  CHECK(pdesim::dominant_mode(quiet, 0.0, 100.0).no_pattern);

  CHECK_THROWS_AS(pdesim::dominant_mode(growing, 98.0, 100.0), std::invalid_argument);
}

TEST_CASE("trajectory writers round-trip") {
  const auto p = params_a();
  const auto eq = plus_eq(p);
  pdesim::SimConfig cfg;
  cfg.N = 24;
  cfg.T = 30.0;
  cfg.snapshot_every = 10.0;
  cfg.mu = p.mu;
  cfg.k_spec = 8;
  const auto traj =
      pdesim::simulate(pdesim::grayscott_reaction(p), 3, {eq.x, eq.y, eq.z}, cfg);

  const std::string bin = "/tmp/turing1_test_traj.bin";
  pdesim::write_trajectory_bin(traj, bin);
  std::ifstream is(bin, std::ios::binary);
  REQUIRE(is.good());
  std::int64_t N = 0, ns = 0, nt = 0;
  is.read(reinterpret_cast<char*>(&N), 8);
  is.read(reinterpret_cast<char*>(&ns), 8);
  is.read(reinterpret_cast<char*>(&nt), 8);
  CHECK(N == traj.N);
  CHECK(ns == traj.n_species);
  CHECK(nt == std::int64_t(traj.times.size()));
  std::vector<double> times(static_cast<std::size_t>(nt), 0.0);
  is.read(reinterpret_cast<char*>(times.data()), nt * 8);
  CHECK(times == traj.times);
  std::vector<double> first(std::size_t(N) * std::size_t(ns));
  is.read(reinterpret_cast<char*>(first.data()), std::streamsize(first.size() * 8));
  REQUIRE(is.good());
  CHECK(first == traj.fields[0]);

  const std::string csv = "/tmp/turing1_test_traj.csv";
  pdesim::write_trajectory_csv(traj, csv);
  std::ifstream cs(csv);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(cs, line)) ++lines;
  CHECK(lines == 1 + traj.times.size() * std::size_t(traj.N));

  std::remove(bin.c_str());
  std::remove(csv.c_str());
}

}  // TEST_SUITE

#include "turing1/pdesim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <numbers>

#include "turing1/kernels.hpp"
#include "turing1/support.hpp"

namespace turing1::pdesim {

namespace {

constexpr double kBlowup = 1e12;
constexpr double kNoiseFloor = 1e-14;

struct Semidiscrete {
  const ReactionFn* reaction;
  int n_species;
  int N;
  double diff_coef;  // mu / h^2

  void operator()(const double* y, double* dy) const {
    (*reaction)(y, dy, N);
    if (diff_coef != 0.0) {
      const std::size_t off = static_cast<std::size_t>(n_species - 1) *
                              static_cast<std::size_t>(N);
      kernels::active_kernels().laplacian_neumann_add(dy + off, y + off, diff_coef,
                                                      static_cast<std::size_t>(N));
    }
  }
};

bool blown_up(const std::vector<double>& y) {
  for (double v : y)
    if (!std::isfinite(v) || std::abs(v) > kBlowup) return true;
  return false;
}

// Time integration behind a small interface so an implicit scheme can be
// swapped in later; both implementations advance to exactly t1.
class TimeStepper {
 public:
  virtual ~TimeStepper() = default;
  virtual void advance(const Semidiscrete& f, double t0, double t1,
                       std::vector<double>& y) = 0;
};

class FixedRK4 : public TimeStepper {
 public:
  explicit FixedRK4(double dt) : dt_(dt) {}

  void advance(const Semidiscrete& f, double t0, double t1,
               std::vector<double>& y) override {
    const auto& K = kernels::active_kernels();
    const std::size_t n = y.size();
    k1_.resize(n); k2_.resize(n); k3_.resize(n); k4_.resize(n); tmp_.resize(n);
    double t = t0;
    while (t < t1 - 1e-14 * std::max(1.0, t1)) {
      const double h = std::min(dt_, t1 - t);
      f(y.data(), k1_.data());
      K.copy_scaled_add(tmp_.data(), y.data(), k1_.data(), 0.5 * h, n);
      f(tmp_.data(), k2_.data());
      K.copy_scaled_add(tmp_.data(), y.data(), k2_.data(), 0.5 * h, n);
      f(tmp_.data(), k3_.data());
      K.copy_scaled_add(tmp_.data(), y.data(), k3_.data(), h, n);
      f(tmp_.data(), k4_.data());
      K.scaled_add(y.data(), k1_.data(), h / 6.0, n);
      K.scaled_add(y.data(), k2_.data(), h / 3.0, n);
      K.scaled_add(y.data(), k3_.data(), h / 3.0, n);
      K.scaled_add(y.data(), k4_.data(), h / 6.0, n);
      t += h;
      if (blown_up(y)) throw Divergence(t);
    }
  }

 private:
  double dt_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

// Dormand-Prince 4(5) embedded pair with FSAL.
class AdaptiveRK45 : public TimeStepper {
 public:
  AdaptiveRK45(double rtol, double atol, double dt_max)
      : rtol_(rtol), atol_(atol), dt_max_(dt_max) {}

  void advance(const Semidiscrete& f, double t0, double t1,
               std::vector<double>& y) override {
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // difference between the 5th- and 4th-order weights (error estimate)
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600;
    static constexpr double e3 = 500.0 / 1113 - 7571.0 / 16695;
    static constexpr double e4 = 125.0 / 192 - 393.0 / 640;
    static constexpr double e5 = -2187.0 / 6784 + 92097.0 / 339200;
    static constexpr double e6 = 11.0 / 84 - 187.0 / 2100;
    static constexpr double e7 = -1.0 / 40;

    const auto& K = kernels::active_kernels();
    const std::size_t n = y.size();
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &ynew_, &err_})
      v->resize(n);

    double t = t0;
    if (!have_k1_) { f(y.data(), k1_.data()); have_k1_ = true; }
    if (dt_ <= 0.0) dt_ = std::min(dt_max_, t1 - t0);

    while (t < t1 - 1e-14 * std::max(1.0, t1)) {
      double h = std::min({dt_, dt_max_, t1 - t});
      if (h <= 1e-14 * std::max(1.0, t)) throw Divergence(t);

      K.copy_scaled_add(tmp_.data(), y.data(), k1_.data(), a21 * h, n);
      f(tmp_.data(), k2_.data());

      K.copy_scaled_add(tmp_.data(), y.data(), k1_.data(), a31 * h, n);
      K.scaled_add(tmp_.data(), k2_.data(), a32 * h, n);
      f(tmp_.data(), k3_.data());

      K.copy_scaled_add(tmp_.data(), y.data(), k1_.data(), a41 * h, n);
      K.scaled_add(tmp_.data(), k2_.data(), a42 * h, n);
      K.scaled_add(tmp_.data(), k3_.data(), a43 * h, n);
      f(tmp_.data(), k4_.data());

      K.copy_scaled_add(tmp_.data(), y.data(), k1_.data(), a51 * h, n);
      K.scaled_add(tmp_.data(), k2_.data(), a52 * h, n);
      K.scaled_add(tmp_.data(), k3_.data(), a53 * h, n);
      K.scaled_add(tmp_.data(), k4_.data(), a54 * h, n);
      f(tmp_.data(), k5_.data());

      K.copy_scaled_add(tmp_.data(), y.data(), k1_.data(), a61 * h, n);
      K.scaled_add(tmp_.data(), k2_.data(), a62 * h, n);
      K.scaled_add(tmp_.data(), k3_.data(), a63 * h, n);
      K.scaled_add(tmp_.data(), k4_.data(), a64 * h, n);
      K.scaled_add(tmp_.data(), k5_.data(), a65 * h, n);
      f(tmp_.data(), k6_.data());

      K.copy_scaled_add(ynew_.data(), y.data(), k1_.data(), b1 * h, n);
      K.scaled_add(ynew_.data(), k3_.data(), b3 * h, n);
      K.scaled_add(ynew_.data(), k4_.data(), b4 * h, n);
      K.scaled_add(ynew_.data(), k5_.data(), b5 * h, n);
      K.scaled_add(ynew_.data(), k6_.data(), b6 * h, n);
      f(ynew_.data(), k7_.data());

      K.copy_scaled_add(err_.data(), k1_.data(), k1_.data(), e1 - 1.0, n);  // err = e1*k1
      K.scaled_add(err_.data(), k3_.data(), e3, n);
      K.scaled_add(err_.data(), k4_.data(), e4, n);
      K.scaled_add(err_.data(), k5_.data(), e5, n);
      K.scaled_add(err_.data(), k6_.data(), e6, n);
      K.scaled_add(err_.data(), k7_.data(), e7, n);
      for (std::size_t i = 0; i < n; ++i) err_[i] *= h;

      const double enorm = K.wrms(err_.data(), y.data(), ynew_.data(), atol_, rtol_, n);
      if (std::isfinite(enorm) && enorm <= 1.0) {
        t += h;
        y.swap(ynew_);
        k1_.swap(k7_);  // FSAL
        if (blown_up(y)) throw Divergence(t);
      }
      double factor = std::isfinite(enorm) && enorm > 0.0
                          ? 0.9 * std::pow(enorm, -0.2)
                          : 5.0;
      factor = std::clamp(factor, 0.2, 5.0);
      dt_ = std::min(h * factor, dt_max_);
    }
  }

 private:
  double rtol_, atol_, dt_max_;
  double dt_ = 0.0;
  bool have_k1_ = false;
  std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, ynew_, err_;
};

}  // namespace

Trajectory simulate(const ReactionFn& reaction, int n_species,
                    const std::vector<double>& base, const SimConfig& cfg) {
  if (n_species < 1) throw std::invalid_argument("simulate: need at least one species");
  if (static_cast<int>(base.size()) != n_species)
    throw std::invalid_argument("simulate: base state size must equal species count");
  if (cfg.N < 16) throw std::invalid_argument("simulate: grid needs N >= 16 points");
  if (!(cfg.L > 0.0)) throw std::invalid_argument("simulate: domain length must be > 0");
  if (!(cfg.T >= 0.0)) throw std::invalid_argument("simulate: final time must be >= 0");
  if (!(cfg.mu >= 0.0)) throw std::invalid_argument("simulate: mu must be >= 0");
  if (!(cfg.snapshot_every > 0.0))
    throw std::invalid_argument("simulate: snapshot interval must be > 0");

  const double h = cfg.L / double(cfg.N - 1);
  const double cfl = cfg.mu > 0.0 ? 0.4 * h * h / cfg.mu
                                  : std::numeric_limits<double>::infinity();
  std::unique_ptr<TimeStepper> stepper;
  if (cfg.adaptive) {
    if (!(cfg.rtol > 0.0) || !(cfg.atol > 0.0))
      throw std::invalid_argument("simulate: adaptive tolerances must be > 0");
    stepper = std::make_unique<AdaptiveRK45>(cfg.rtol, cfg.atol, cfl);
  } else {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("simulate: fixed dt must be > 0");
    if (cfg.dt > cfl)
      throw std::invalid_argument(
          "simulate: fixed dt violates the diffusion stability bound "
          "0.4*h^2/mu = " + std::to_string(cfl));
    stepper = std::make_unique<FixedRK4>(cfg.dt);
  }

  // assemble the initial state: homogeneous base + cosine perturbation
  const std::size_t total = static_cast<std::size_t>(n_species) *
                            static_cast<std::size_t>(cfg.N);
  std::vector<double> y(total);
  std::vector<double> pert(static_cast<std::size_t>(cfg.N), 0.0);
  for (int i = 0; i < cfg.N; ++i) {
    const double xi = double(i) * h;
    switch (cfg.ic.kind) {
      case InitialCondition::Kind::Equilibrium:
        break;
      case InitialCondition::Kind::MultiMode:
        for (int j = 1; j <= 20; ++j)
          pert[static_cast<std::size_t>(i)] +=
              0.01 * std::cos(double(j) * std::numbers::pi * xi / cfg.L);
        break;
      case InitialCondition::Kind::SingleMode:
        pert[static_cast<std::size_t>(i)] =
            cfg.ic.amplitude *
            std::cos(double(cfg.ic.mode) * std::numbers::pi * xi / cfg.L);
        break;
    }
  }
  for (int s = 0; s < n_species; ++s)
    for (int i = 0; i < cfg.N; ++i)
      y[static_cast<std::size_t>(s) * static_cast<std::size_t>(cfg.N) +
        static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(s)] +
                                       pert[static_cast<std::size_t>(i)];

  Semidiscrete f{&reaction, n_species, cfg.N, cfg.mu > 0.0 ? cfg.mu / (h * h) : 0.0};

  Trajectory traj;
  traj.N = cfg.N;
  traj.n_species = n_species;
  traj.L = cfg.L;
  traj.k_spec = std::min(cfg.k_spec, cfg.N - 1);

  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.fields.push_back(y);
    std::vector<double> spec(static_cast<std::size_t>(n_species) *
                             static_cast<std::size_t>(traj.k_spec + 1));
    for (int s = 0; s < n_species; ++s) {
      const auto coeffs = mode_spectrum(
          y.data() + static_cast<std::size_t>(s) * static_cast<std::size_t>(cfg.N),
          cfg.N, traj.k_spec);
      std::copy(coeffs.begin(), coeffs.end(),
                spec.begin() + static_cast<std::size_t>(s) *
                                   static_cast<std::size_t>(traj.k_spec + 1));
    }
    traj.spectra.push_back(std::move(spec));
  };

  record(0.0);
  double t = 0.0;
  while (t < cfg.T - 1e-12 * std::max(1.0, cfg.T)) {
    const double target = std::min(t + cfg.snapshot_every, cfg.T);
    stepper->advance(f, t, target, y);
    t = target;
    record(t);
  }
  return traj;
}

std::vector<double> mode_spectrum(const double* field, int N, int K) {
  const int M = N - 1;
  K = std::min(K, M);
  std::vector<double> out(static_cast<std::size_t>(K) + 1);
  for (int k = 0; k <= K; ++k) {
    double acc = 0.5 * field[0];
    const double step = std::numbers::pi * double(k) / double(M);
    for (int i = 1; i < M; ++i) acc += field[i] * std::cos(step * double(i));
    acc += 0.5 * field[M] * std::cos(std::numbers::pi * double(k));
    const double norm = (k == 0 || k == M) ? double(M) : double(M) / 2.0;
    out[static_cast<std::size_t>(k)] = acc / norm;
  }
  return out;
}

std::vector<double> mode_reconstruct(const std::vector<double>& coeffs, int N) {
  const int M = N - 1;
  std::vector<double> out(static_cast<std::size_t>(N), 0.0);
  for (int i = 0; i < N; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      acc += coeffs[k] * std::cos(std::numbers::pi * double(k) * double(i) / double(M));
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

namespace {

struct LineFit {
  double slope = 0.0;
  double sse = 0.0;
};

LineFit ls_fit(const std::vector<double>& t, const std::vector<double>& v,
               std::size_t lo, std::size_t hi) {
  // least-squares line of v against t over [lo, hi]; also reports the
  // residual sum of squares so segmented fits can be compared
  const double n = double(hi - lo + 1);
  double tm = 0, vm = 0;
  for (std::size_t i = lo; i <= hi; ++i) {
    tm += t[i];
    vm += v[i];
  }
  tm /= n;
  vm /= n;
  double ctt = 0, ctv = 0, cvv = 0;
  for (std::size_t i = lo; i <= hi; ++i) {
    const double dt = t[i] - tm, dv = v[i] - vm;
    ctt += dt * dt;
    ctv += dt * dv;
    cvv += dv * dv;
  }
  LineFit f;
  if (ctt == 0.0) {
    f.sse = cvv;
    return f;
  }
  f.slope = ctv / ctt;
  f.sse = std::max(0.0, cvv - f.slope * ctv);
  return f;
}

double ls_slope(const std::vector<double>& t, const std::vector<double>& v,
                std::size_t lo, std::size_t hi) {
  return ls_fit(t, v, lo, hi).slope;
}

}  // namespace

DominantMode dominant_mode(const Trajectory& traj, double window_lo, double window_hi) {
  if (traj.times.empty()) throw std::invalid_argument("dominant_mode: empty trajectory");
  const std::size_t nt = traj.times.size();
  std::size_t w0 = nt, w1 = 0;
  for (std::size_t i = 0; i < nt; ++i) {
    if (traj.times[i] >= window_lo - 1e-12 && traj.times[i] <= window_hi + 1e-12) {
      w0 = std::min(w0, i);
      w1 = std::max(w1, i);
    }
  }
  if (w0 >= nt || w1 < w0 || (w1 - w0 + 1) < 5)
    throw std::invalid_argument("dominant_mode: window must contain at least 5 samples");

  DominantMode dm;
  dm.window_lo = traj.times[w0];
  dm.window_hi = traj.times[w1];

  // cross-species amplitude per mode and snapshot
  const int K = traj.k_spec;
  auto amp = [&](std::size_t it, int k) {
    double acc = 0.0;
    for (int s = 0; s < traj.n_species; ++s) {
      const double c = traj.spectra[it][static_cast<std::size_t>(s) *
                                            static_cast<std::size_t>(K + 1) +
                                        static_cast<std::size_t>(k)];
      acc += c * c;
    }
    return std::sqrt(acc);
  };

  int k_star = 0;
  double best = -1.0;
  for (int k = 1; k <= K; ++k) {
    double mean = 0.0;
    for (std::size_t it = w0; it <= w1; ++it) mean += amp(it, k);
    mean /= double(w1 - w0 + 1);
    if (mean > best) { best = mean; k_star = k; }
  }
  if (best < kNoiseFloor) {
    dm.no_pattern = true;
    return dm;
  }
  dm.k_star = k_star;

  // growth fit on the full series of the winning mode
  std::vector<double> ts, logs;
  for (std::size_t it = 0; it < nt; ++it) {
    const double a = amp(it, k_star);
    if (a > kNoiseFloor) {
      ts.push_back(traj.times[it]);
      logs.push_back(std::log(a));
    }
  }
  if (ts.size() < 5) return dm;  // too short to fit; rate stays 0

  // drop a trailing machine-noise plateau (e.g. a decay parked just above
  // the floor) so it cannot flatten either segment of the fit below
  std::size_t last = ts.size() - 1;
  while (last > 4 && logs[last] < std::log(kNoiseFloor * 10.0)) --last;

  // Saturation = the late slope flattening below 10% of the early slope.
  // Oscillatory modes put deep dips into log amplitude, so short-window
  // slope estimates swing wildly; instead fit two least-squares segments
  // around a breakpoint chosen to minimise the total residual, which
  // averages the ripple out of both slope estimates. Each segment must be
  // long enough (a tenth / a fifth of the series) to span several ripple
  // periods.
  std::size_t fit_hi = last;
  const std::size_t b_lo = std::max<std::size_t>(5, (last + 1) / 10);
  const std::size_t min_tail = std::max<std::size_t>(5, (last + 1) / 5);
  if (last > b_lo + min_tail) {
    const std::size_t b_hi = last - min_tail;
    const std::size_t step = std::max<std::size_t>(1, (b_hi - b_lo) / 400);
    double best_sse = std::numeric_limits<double>::infinity();
    std::size_t best_b = 0;
    double s_early = 0.0, s_late = 0.0;
    for (std::size_t b = b_lo; b <= b_hi; b += step) {
      const LineFit f1 = ls_fit(ts, logs, 0, b);
      const LineFit f2 = ls_fit(ts, logs, b, last);
      if (f1.sse + f2.sse < best_sse) {
        best_sse = f1.sse + f2.sse;
        best_b = b;
        s_early = f1.slope;
        s_late = f2.slope;
      }
    }
    if (s_early > 0.0 && s_late < 0.1 * s_early) {
      dm.saturated = true;
      fit_hi = best_b;
    }
  }
  dm.growth_rate = ls_slope(ts, logs, 0, fit_hi);
  return dm;
}

ReactionFn grayscott_reaction(const grayscott::GSParams& p) {
  kernels::GSRates r{p.gamma, p.k_rate, p.eta1, p.eta2};
  return [r](const double* state, double* deriv, int N) {
    const auto n = static_cast<std::size_t>(N);
    kernels::active_kernels().gs_reaction(state, state + n, state + 2 * n, deriv,
                                          deriv + n, deriv + 2 * n, n, r);
  };
}

ReactionFn linear_reaction(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw std::invalid_argument("linear_reaction: matrix must be square");
  const Eigen::MatrixXd M = A;
  return [M](const double* state, double* deriv, int N) {
    const auto n = static_cast<std::size_t>(N);
    const auto& K = kernels::active_kernels();
    for (long s = 0; s < M.rows(); ++s) {
      double* d = deriv + static_cast<std::size_t>(s) * n;
      std::fill(d, d + n, 0.0);
      for (long j = 0; j < M.cols(); ++j)
        K.scaled_add(d, state + static_cast<std::size_t>(j) * n, M(s, j), n);
    }
  };
}

namespace {

std::FILE* open_or_throw(const std::string& path, const char* mode) {
  std::FILE* fp = std::fopen(path.c_str(), mode);
  if (!fp) throw std::runtime_error("cannot open output file: " + path);
  return fp;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::FILE* fp = open_or_throw(path, "w");
  std::fprintf(fp, "time,xi");
  if (traj.n_species == 3) {
    std::fprintf(fp, ",x,y,z");
  } else {
    for (int s = 0; s < traj.n_species; ++s) std::fprintf(fp, ",c%d", s);
  }
  std::fprintf(fp, "\n");
  const double h = traj.L / double(traj.N - 1);
  for (std::size_t it = 0; it < traj.times.size(); ++it) {
    for (int i = 0; i < traj.N; ++i) {
      std::fprintf(fp, "%s,%s", g17(traj.times[it]).c_str(), g17(double(i) * h).c_str());
      for (int s = 0; s < traj.n_species; ++s)
        std::fprintf(fp, ",%s",
                     g17(traj.fields[it][static_cast<std::size_t>(s) *
                                             static_cast<std::size_t>(traj.N) +
                                         static_cast<std::size_t>(i)])
                         .c_str());
      std::fprintf(fp, "\n");
    }
  }
  std::fclose(fp);
}

void write_trajectory_bin(const Trajectory& traj, const std::string& path) {
  std::FILE* fp = open_or_throw(path, "wb");
  const std::int64_t header[3] = {traj.N, traj.n_species,
                                  static_cast<std::int64_t>(traj.times.size())};
  std::fwrite(header, sizeof(std::int64_t), 3, fp);
  std::fwrite(traj.times.data(), sizeof(double), traj.times.size(), fp);
  for (const auto& f : traj.fields) std::fwrite(f.data(), sizeof(double), f.size(), fp);
  std::fclose(fp);
}

void write_spectra_csv(const Trajectory& traj, const std::string& path) {
  std::FILE* fp = open_or_throw(path, "w");
  std::fprintf(fp, "time,k,species,coefficient\n");
  for (std::size_t it = 0; it < traj.times.size(); ++it)
    for (int k = 0; k <= traj.k_spec; ++k)
      for (int s = 0; s < traj.n_species; ++s)
        std::fprintf(fp, "%s,%d,%d,%s\n", g17(traj.times[it]).c_str(), k, s,
                     g17(traj.spectra[it][static_cast<std::size_t>(s) *
                                              static_cast<std::size_t>(traj.k_spec + 1) +
                                          static_cast<std::size_t>(k)])
                         .c_str());
  std::fclose(fp);
}

}  // namespace turing1::pdesim

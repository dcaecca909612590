#include "turing1/grayscott.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "turing1/support.hpp"

namespace turing1::grayscott {

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Zero: return "zero";
    case Branch::Plus: return "plus";
    case Branch::Minus: return "minus";
  }
  return "?";
}

const char* status_name(CellStatus s) {
  switch (s) {
    case CellStatus::TypeI: return "TypeI";
    case CellStatus::notTypeI: return "notTypeI";
    case CellStatus::noEquilibrium: return "noEquilibrium";
  }
  return "?";
}

std::array<double, 3> rhs(const GSParams& p, double x, double y, double z) {
  // shared subexpressions keep the x<->y and y<->z exchange terms exactly
  // antisymmetric in floating point, so the sum identity holds to roundoff
  const double y2 = y * y;
  const double flux = x * y2 - p.eta1 * y2 * y;       // X + 2Y <=> 3Y net rate
  const double inter = p.k_rate * (y - p.eta2 * z);   // Y <=> Z net rate
  return {-flux + p.gamma * (1.0 - x),
          flux - inter - p.gamma * y,
          inter - p.gamma * z};
}

double v_rate(const GSParams& p) { return p.gamma + p.k_rate * p.eta2; }

double w_disc(const GSParams& p) {
  const double v = v_rate(p);
  return v * v - 4.0 * p.gamma * (p.k_rate + v) * ((1.0 + p.eta1) * v + p.k_rate);
}

double rhs_residual(const GSParams& p, const GSEquilibrium& eq) {
  const auto r = rhs(p, eq.x, eq.y, eq.z);
  return std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
}

std::vector<GSEquilibrium> equilibria(const GSParams& p) {
  const double v = v_rate(p);
  if (v == 0.0)
    throw std::invalid_argument(
        "equilibria: gamma and k*eta2 are both zero (degenerate parameters)");
  std::vector<GSEquilibrium> out;
  out.push_back(GSEquilibrium{Branch::Zero, 1.0, 0.0, 0.0, true});

  const double w = w_disc(p);
  if (w < 0.0) return out;
  const double denom = 2.0 * ((1.0 + p.eta1) * v + p.k_rate);
  const double root = std::sqrt(w);
  for (int sign = +1; sign >= -1; sign -= 2) {
    const double y = (v + sign * root) / denom;
    const double xden = y * y + p.gamma;
    if (xden == 0.0) continue;  // gamma = 0 and y = 0: x is indeterminate
    GSEquilibrium eq;
    eq.branch = (sign > 0) ? Branch::Plus : Branch::Minus;
    eq.y = y;
    eq.z = p.k_rate * y / v;
    eq.x = (p.eta1 * y * y * y + p.gamma) / xden;
    eq.physical = eq.x >= 0.0 && eq.y >= 0.0 && eq.z >= 0.0;
    out.push_back(eq);
  }
  return out;
}

Eigen::Matrix3d jacobian_at(const GSParams& p, const GSEquilibrium& eq) {
  if (rhs_residual(p, eq) > 1e-10)
    throw std::invalid_argument("jacobian_at: point is not an equilibrium (residual > 1e-10)");
  const double x = eq.x, y = eq.y;
  Eigen::Matrix3d J;
  J << -y * y - p.gamma, -2.0 * x * y + 3.0 * p.eta1 * y * y, 0.0,
       y * y, 2.0 * x * y - 3.0 * p.eta1 * y * y - p.k_rate - p.gamma, p.k_rate * p.eta2,
       0.0, p.k_rate, -p.k_rate * p.eta2 - p.gamma;
  return J;
}

namespace {

// TypeI per a dense gain scan; used by the optional sweep verification.
bool type1_by_scan(const model::LinearSystem& sys) {
  const model::RationalTransfer tf = model::transfer_function(sys);
  if (!numerics::is_hurwitz(tf.den)) return false;
  const double beta = numerics::poly_roots(tf.num).max_real();
  const double hi = std::max(1.0, 1e3 * sys.A.norm());
  const auto scan = classify::lambda_scan(tf, hi * 1e-10, hi, 2500);
  const double tol = classify::default_tol_dom(sys);
  return scan.max_rightmost >= std::max(0.0, beta) - tol;
}

}  // namespace

SweepResult region_sweep(double gamma_lo, double gamma_hi, double k_lo, double k_hi,
                         int n_gamma, int n_k, double eta1, double eta2,
                         double mu, double L, double verify_fraction, unsigned seed) {
  if (!(gamma_lo > 0.0) || !(k_lo > 0.0) || gamma_hi < gamma_lo || k_hi < k_lo)
    throw std::invalid_argument("region_sweep: ranges must be positive and ordered");
  if (n_gamma < 1 || n_k < 1)
    throw std::invalid_argument("region_sweep: grid resolution must be >= 1");

  SweepResult res;
  res.n_gamma = n_gamma;
  res.n_k = n_k;
  res.gammas.resize(static_cast<std::size_t>(n_gamma));
  res.ks.resize(static_cast<std::size_t>(n_k));
  for (int i = 0; i < n_gamma; ++i)
    res.gammas[static_cast<std::size_t>(i)] =
        (n_gamma == 1) ? gamma_lo
                       : gamma_lo + (gamma_hi - gamma_lo) * double(i) / double(n_gamma - 1);
  for (int j = 0; j < n_k; ++j)
    res.ks[static_cast<std::size_t>(j)] =
        (n_k == 1) ? k_lo : k_lo + (k_hi - k_lo) * double(j) / double(n_k - 1);

  res.cells.resize(static_cast<std::size_t>(n_gamma) * static_cast<std::size_t>(n_k));
  std::vector<int> checked(static_cast<std::size_t>(n_gamma), 0);
  std::vector<int> mismatch(static_cast<std::size_t>(n_gamma), 0);

  parallel_for(static_cast<std::size_t>(n_gamma), [&](std::size_t i) {
    for (int j = 0; j < n_k; ++j) {
      SweepCell cell;
      cell.gamma = res.gammas[i];
      cell.k_rate = res.ks[static_cast<std::size_t>(j)];
      GSParams p;
      p.gamma = cell.gamma;
      p.k_rate = cell.k_rate;
      p.eta1 = eta1;
      p.eta2 = eta2;
      p.mu = mu;

      const auto eqs = equilibria(p);
      const GSEquilibrium* plus = nullptr;
      for (const auto& e : eqs)
        if (e.branch == Branch::Plus) plus = &e;
      if (!plus) {
        cell.status = CellStatus::noEquilibrium;
      } else if (!plus->physical) {
        cell.status = CellStatus::notTypeI;
        cell.nonphysical = true;
      } else {
        model::LinearSystem sys{jacobian_at(p, *plus)};
        const model::RationalTransfer tf = model::transfer_function(sys);
        cell.alpha2 = tf.den.c[1];
        cell.alpha1 = tf.den.c[2];
        cell.alpha0 = tf.den.c[3];
        cell.alphat1 = tf.num.c[1];
        cell.alphat0 = tf.num.c[2];
        cell.have_alphas = true;
        cell.flags = classify::three_species_conditions(sys);
        cell.status = cell.flags.type1() ? CellStatus::TypeI : CellStatus::notTypeI;
        if (cell.status == CellStatus::TypeI && verify_fraction > 0.0) {
          std::mt19937 rng(seed ^ static_cast<unsigned>(i * 1000003u + std::size_t(j)));
          if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < verify_fraction) {
            ++checked[i];
            if (!type1_by_scan(sys)) ++mismatch[i];
          }
        }
      }
      res.cells[i * static_cast<std::size_t>(n_k) + static_cast<std::size_t>(j)] = cell;
    }
  });
  for (std::size_t i = 0; i < checked.size(); ++i) {
    res.verify_checked += checked[i];
    res.verify_mismatch += mismatch[i];
  }
  return res;
}

RegionTopology region_topology(const SweepResult& sweep) {
  RegionTopology topo;
  const int R = sweep.n_gamma, C = sweep.n_k;
  auto is_region = [&](int i, int j) {
    return sweep.at(i, j).status == CellStatus::TypeI;
  };
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j)
      if (is_region(i, j)) ++topo.cells;
  topo.nonempty = topo.cells > 0;
  if (!topo.nonempty) return topo;

  // flood fill the region itself: connected <=> one component
  std::vector<char> seen(static_cast<std::size_t>(R * C), 0);
  auto flood = [&](int si, int sj, auto&& pred) {
    std::vector<std::pair<int, int>> stack{{si, sj}};
    seen[static_cast<std::size_t>(si * C + sj)] = 1;
    int count = 0;
    while (!stack.empty()) {
      auto [i, j] = stack.back();
      stack.pop_back();
      ++count;
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const int ni = i + di[d], nj = j + dj[d];
        if (ni < 0 || nj < 0 || ni >= R || nj >= C) continue;
        if (seen[static_cast<std::size_t>(ni * C + nj)]) continue;
        if (!pred(ni, nj)) continue;
        seen[static_cast<std::size_t>(ni * C + nj)] = 1;
        stack.emplace_back(ni, nj);
      }
    }
    return count;
  };

  int first_i = -1, first_j = -1;
  for (int i = 0; i < R && first_i < 0; ++i)
    for (int j = 0; j < C; ++j)
      if (is_region(i, j)) { first_i = i; first_j = j; break; }
  const int reached = flood(first_i, first_j, is_region);
  topo.connected = (reached == topo.cells);

  // holes: flood the complement from the grid boundary; any complement cell
  // left unreached is enclosed by the region
  std::fill(seen.begin(), seen.end(), 0);
  auto is_comp = [&](int i, int j) { return !is_region(i, j); };
  int comp_reached = 0, comp_total = R * C - topo.cells;
  for (int i = 0; i < R; ++i)
    for (int j = 0; j < C; ++j) {
      const bool boundary = (i == 0 || j == 0 || i == R - 1 || j == C - 1);
      if (boundary && is_comp(i, j) && !seen[static_cast<std::size_t>(i * C + j)])
        comp_reached += flood(i, j, is_comp);
    }
  topo.simply_connected = topo.connected && (comp_reached == comp_total);
  return topo;
}

}  // namespace turing1::grayscott

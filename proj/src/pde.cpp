#include "ydsim/pde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ydsim/ensembles.hpp"

namespace ydsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double ModelConstants::alpha() { return kPi / std::sqrt(6.0); }
double ModelConstants::beta() { return kPi / std::sqrt(12.0); }

double vershik_u(double u) {
  if (!(u > 0.0)) throw std::invalid_argument("vershik_u requires u > 0");
  const double a = ModelConstants::alpha();
  return -std::log1p(-std::exp(-a * u)) / a;
}

double vershik_r(double u) {
  if (!(u >= 0.0)) throw std::invalid_argument("vershik_r requires u >= 0");
  const double b = ModelConstants::beta();
  return std::log1p(std::exp(-b * u)) / b;
}

GridField vershik_u_field(double umin, double h, std::size_t n) {
  return sample_function(umin, h, n, [](double u) { return vershik_u(u); });
}

GridField vershik_r_field(double h, std::size_t n) {
  return sample_function(0.0, h, n, [](double u) { return vershik_r(u); });
}

GridField perturbed_vershik_u(int variant, double umin, double h, std::size_t n) {
  switch (variant) {
    case 1:  // multiplicative bump centered at u = 1
      return sample_function(umin, h, n, [](double u) {
        return vershik_u(u) * (1.0 + 0.15 * std::exp(-2.0 * (u - 1.0) * (u - 1.0)));
      });
    case 2:  // multiplicative dent centered at u = 1.5
      return sample_function(umin, h, n, [](double u) {
        return vershik_u(u) * (1.0 - 0.12 * std::exp(-2.0 * (u - 1.5) * (u - 1.5)));
      });
    case 3:  // smooth reparametrization of the argument
      return sample_function(umin, h, n, [](double u) {
        return vershik_u(u * (1.0 + 0.1 * std::exp(-u)));
      });
    default:
      throw std::invalid_argument("perturbed_vershik_u: variant must be 1, 2 or 3");
  }
}

GridField perturbed_vershik_r(int variant, double h, std::size_t n) {
  // additive a u^2 e^(-lambda u): vanishing value and slope at u = 0, so the
  // boundary slope -1/2 of the class is preserved exactly
  double a, lambda;
  switch (variant) {
    case 1: a = 0.10; lambda = 2.0; break;
    case 2: a = -0.08; lambda = 1.5; break;
    case 3: a = 0.12; lambda = 2.5; break;
    default:
      throw std::invalid_argument("perturbed_vershik_r: variant must be 1, 2 or 3");
  }
  return sample_function(0.0, h, n, [a, lambda](double u) {
    return vershik_r(u) + a * u * u * std::exp(-lambda * u);
  });
}

void PdeConfig::validate(double grid_h) const {
  if (!(domain_length > 0.0)) throw std::invalid_argument("PdeConfig: L must be > 0");
  if (!(h > 0.0)) throw std::invalid_argument("PdeConfig: h must be > 0");
  if (!(dt > 0.0)) throw std::invalid_argument("PdeConfig: dt must be > 0");
  if (scheme == Scheme::Explicit && dt > 0.5 * grid_h * grid_h)
    throw std::invalid_argument("PdeConfig: explicit scheme violates dt <= h^2/2");
}

namespace {

struct MarchPlan {
  std::int64_t full_steps;
  double remainder;
};

MarchPlan plan_march(double horizon, double dt) {
  if (!(horizon >= 0.0)) throw std::invalid_argument("solver horizon must be >= 0");
  const auto steps = static_cast<std::int64_t>(std::floor(horizon / dt + 1e-9));
  double rem = horizon - static_cast<double>(steps) * dt;
  if (rem < 1e-12 * std::max(1.0, horizon)) rem = 0.0;
  return {steps, rem};
}

}  // namespace

GridField solve_burgers_z(const GridField& rho0, double horizon, const PdeConfig& cfg) {
  cfg.validate(rho0.h);
  const std::size_t n = rho0.size();
  if (n < 3) throw std::invalid_argument("solve_burgers_z: grid too short");
  if (!(rho0.xmin < 0.0 && rho0.xmax() > 0.0))
    throw std::invalid_argument("solve_burgers_z: domain must straddle the origin");
  const double a = ModelConstants::alpha();
  for (double v : rho0.values)
    if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
      throw std::invalid_argument("solve_burgers_z: density outside [0,1]");
  // far-field closeness to the step profile (factor 2 covers rounding)
  if (std::abs(1.0 - rho0.values.front()) > 2.0 * std::exp(-a * std::abs(rho0.xmin)))
    throw std::invalid_argument("solve_burgers_z: left boundary too far from 1");
  if (std::abs(rho0.values.back()) > 2.0 * std::exp(-a * rho0.xmax()))
    throw std::invalid_argument("solve_burgers_z: right boundary too far from 0");

  std::vector<double> rho = rho0.values;
  const double h = rho0.h;
  const auto [full_steps, remainder] = plan_march(horizon, cfg.dt);

  const std::size_t m = n - 2;  // interior unknowns
  std::vector<double> flux(n), next(n), lo(m), di(m), up(m), b(m);
  const auto do_step = [&](double dt) {
    for (std::size_t j = 0; j < n; ++j) flux[j] = a * rho[j] * (1.0 - rho[j]);
    if (cfg.scheme == Scheme::Explicit) {
      next = rho;
      for (std::size_t j = 1; j + 1 < n; ++j) {
        next[j] = rho[j] +
                  dt * ((rho[j + 1] - 2.0 * rho[j] + rho[j - 1]) / (h * h) +
                        (flux[j + 1] - flux[j - 1]) / (2.0 * h));
      }
      rho.swap(next);
    } else {
      const double mu = dt / (h * h);
      lo.assign(m, -mu);
      di.assign(m, 1.0 + 2.0 * mu);
      up.assign(m, -mu);
      for (std::size_t j = 1; j + 1 < n; ++j)
        b[j - 1] = rho[j] + dt * (flux[j + 1] - flux[j - 1]) / (2.0 * h);
      b[0] += mu * rho[0];
      b[m - 1] += mu * rho[n - 1];
      solve_tridiagonal(lo, di, up, b);
      for (std::size_t j = 1; j + 1 < n; ++j) rho[j] = b[j - 1];
    }
    bool in_range = true;
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(rho[j])) throw NumericalError("solve_burgers_z: NaN/Inf detected");
      in_range = in_range && rho[j] >= -1e-12 && rho[j] <= 1.0 + 1e-12;
    }
    if (!in_range)
      throw NumericalError("solve_burgers_z: density left [0,1] beyond tolerance");
  };

  for (std::int64_t s = 0; s < full_steps; ++s) do_step(cfg.dt);
  if (remainder > 0.0) do_step(remainder);
  return GridField(rho0.xmin, rho0.h, std::move(rho));
}

GridField solve_omega(const GridField& omega0, double horizon, const PdeConfig& cfg,
                      double* robin_residual_out) {
  cfg.validate(omega0.h);
  const std::size_t n = omega0.size();
  if (n < 3) throw std::invalid_argument("solve_omega: grid too short");
  if (std::abs(omega0.xmin) > 1e-12)
    throw std::invalid_argument("solve_omega: domain must start at u = 0");
  const double b = ModelConstants::beta();
  for (double v : omega0.values)
    if (!(v >= 1.0 - 1e-12))
      throw std::invalid_argument("solve_omega: initial data must be >= 1");
  if (std::abs(omega0.values.back() - 1.0) > 2.0 * std::exp(-b * omega0.xmax()))
    throw std::invalid_argument("solve_omega: right boundary too far from 1");

  const double h = omega0.h;
  if (robin_residual_out != nullptr) {
    const double du0 = (-3.0 * omega0.values[0] + 4.0 * omega0.values[1] - omega0.values[2]) /
                       (2.0 * h);
    *robin_residual_out = std::abs(2.0 * du0 + b * omega0.values[0]);
  }

  std::vector<double> w = omega0.values;
  const auto [full_steps, remainder] = plan_march(horizon, cfg.dt);

  const std::size_t m = n - 1;  // unknowns j = 0..n-2; w[n-1] = 1 fixed
  std::vector<double> next(n), lo(m), di(m), up(m), rhs(m);
  const auto do_step = [&](double dt) {
    const double mu = dt / (h * h);
    // Ghost elimination at u=0: w(-h) = w(h) + h b w(0), so the diffusion
    // stencil becomes (2 w1 - (2 - h b) w0)/h^2 and the drift at 0 equals
    // -b^2 w0 / 2 exactly by the Robin relation.
    if (cfg.scheme == Scheme::Explicit) {
      next = w;
      next[0] = w[0] + dt * ((2.0 * w[1] - (2.0 - h * b) * w[0]) / (h * h) -
                             0.5 * b * b * w[0]);
      for (std::size_t j = 1; j + 1 < n; ++j)
        next[j] = w[j] + dt * ((w[j + 1] - 2.0 * w[j] + w[j - 1]) / (h * h) +
                               b * (w[j + 1] - w[j - 1]) / (2.0 * h));
      w.swap(next);
    } else {
      lo.assign(m, -mu);
      di.assign(m, 1.0 + 2.0 * mu);
      up.assign(m, -mu);
      di[0] = 1.0 + mu * (2.0 - h * b);
      up[0] = -2.0 * mu;
      rhs[0] = w[0] + dt * (-0.5 * b * b * w[0]);
      for (std::size_t j = 1; j < m; ++j)
        rhs[j] = w[j] + dt * b * (w[j + 1] - w[j - 1]) / (2.0 * h);
      rhs[m - 1] += mu * w[n - 1];
      solve_tridiagonal(lo, di, up, rhs);
      for (std::size_t j = 0; j < m; ++j) w[j] = rhs[j];
    }
    bool ok = true;
    for (double v : w) {
      if (!std::isfinite(v)) throw NumericalError("solve_omega: NaN/Inf detected");
      ok = ok && v >= 1.0 - 1e-10;
    }
    if (!ok) throw NumericalError("solve_omega: solution dropped below 1 beyond tolerance");
  };

  for (std::int64_t s = 0; s < full_steps; ++s) do_step(cfg.dt);
  if (remainder > 0.0) do_step(remainder);
  return GridField(0.0, h, std::move(w));
}

GridField hopf_cole_macro(const GridField& rho, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("hopf_cole_macro: beta must be > 0");
  for (double v : rho.values)
    if (!(v >= -1e-12 && v <= 1.0 + 1e-12))
      throw std::invalid_argument("hopf_cole_macro: density outside [0,1]");
  const auto cum = cumulative_trapezoid(rho);
  const double total = cum.back();
  std::vector<double> w(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k)
    w[k] = std::exp(beta * (total - cum[k]));
  return GridField(rho.xmin, rho.h, std::move(w));
}

GridField inverse_hopf_cole(const GridField& omega, double beta) {
  if (!(beta > 0.0)) throw std::invalid_argument("inverse_hopf_cole: beta must be > 0");
  std::vector<double> psi(omega.size());
  for (std::size_t k = 0; k < omega.size(); ++k) {
    const double w = omega.values[k];
    if (w < 1.0 - 1e-9)
      throw std::invalid_argument("inverse_hopf_cole: omega below 1");
    psi[k] = std::max(0.0, std::log(w) / beta);
  }
  return GridField(omega.xmin, omega.h, std::move(psi));
}

GridField phi_u(const GridField& psi) {
  const double g0 = psi.xmin - psi.values.front();
  const double g1 = psi.xmax() - psi.values.back();
  const std::size_t n = psi.size();
  return phi_u(psi, g0, (g1 - g0) / static_cast<double>(n - 1), n);
}

GridField phi_u(const GridField& psi, double vmin, double h, std::size_t n) {
  if (psi.size() < 3) throw std::invalid_argument("phi_u: grid too short");
  std::vector<double> us(psi.size()), gs(psi.size());
  for (std::size_t k = 0; k < psi.size(); ++k) {
    us[k] = psi.x(k);
    gs[k] = us[k] - psi.values[k];
  }
  // rejects non-monotone psi: G must be strictly increasing
  MonotoneInterpolant g_inverse(us, gs);
  const GridField slope = derivative(psi);
  for (double s : slope.values)
    if (!(s < 0.0)) throw std::invalid_argument("phi_u: psi must be strictly decreasing");
  std::vector<double> rho(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = vmin + static_cast<double>(k) * h;
    const double u = g_inverse.inverse(v);
    const double s = slope.value_at(u);
    rho[k] = -s / (1.0 - s);
  }
  return GridField(vmin, h, std::move(rho));
}

GridField psi_from_rho(const GridField& rho, double umin, double h, std::size_t n,
                       double centering_tol) {
  if (rho.size() < 3) throw std::invalid_argument("psi_from_rho: grid too short");
  const double a = ModelConstants::alpha();
  for (double v : rho.values)
    if (!(v > 0.0 && v < 1.0))
      throw std::invalid_argument("psi_from_rho: density must lie strictly inside (0,1)");

  const std::size_t m = rho.size();
  // tail mass beyond the grid closed with the logistic tails of the
  // reference profile class (exact for the stationary shape)
  const double left_tail = -std::log(rho.values.front()) / a;
  const double right_tail = -std::log1p(-rho.values.back()) / a;

  std::vector<double> hole_density(m);
  for (std::size_t k = 0; k < m; ++k) hole_density[k] = 1.0 - rho.values[k];
  const GridField one_minus(rho.xmin, rho.h, std::move(hole_density));
  const auto cum_hole = cumulative_trapezoid(one_minus);
  const auto cum_rho = cumulative_trapezoid(rho);
  const double total_rho = cum_rho.back();

  std::vector<double> vs(m), zminus(m), zplus(m);
  for (std::size_t k = 0; k < m; ++k) {
    vs[k] = rho.x(k);
    zminus[k] = left_tail + cum_hole[k];
    zplus[k] = right_tail + (total_rho - cum_rho[k]);
  }

  // centering: mass of holes left of the origin equals particle mass right
  // of it (the macroscopic analogue of the configuration-space invariant)
  {
    const GridField zm(rho.xmin, rho.h, zminus);
    const GridField zp(rho.xmin, rho.h, zplus);
    if (!(rho.xmin <= 0.0 && rho.xmax() >= 0.0))
      throw std::invalid_argument("psi_from_rho: grid must straddle the origin");
    const double mismatch = std::abs(zm.value_at(0.0) - zp.value_at(0.0));
    if (mismatch > centering_tol)
      throw std::invalid_argument("psi_from_rho: centering mismatch exceeds tolerance");
  }

  MonotoneInterpolant zminus_inverse(vs, zminus);
  const GridField zplus_field(rho.xmin, rho.h, zplus);
  const double u_lo = zminus.front();
  const double u_hi = zminus.back();
  std::vector<double> psi(n);
  for (std::size_t k = 0; k < n; ++k) {
    double u = umin + static_cast<double>(k) * h;
    // allow one grid cell of slack at the ends of the reachable range
    if (u < u_lo - h || u > u_hi + h)
      throw std::out_of_range("psi_from_rho: requested u outside the reachable range");
    u = std::clamp(u, u_lo, u_hi);
    psi[k] = zplus_field.value_at(zminus_inverse.inverse(u));
  }
  return GridField(umin, h, std::move(psi));
}

bool is_class_xu(const GridField& psi) {
  if (psi.size() < 3) return false;
  for (double v : psi.values)
    if (!(v > 0.0)) return false;
  for (std::size_t k = 1; k < psi.size(); ++k)
    if (!(psi.values[k] < psi.values[k - 1])) return false;
  return psi.values.front() >= 1.0 && psi.values.back() <= 0.1;
}

bool is_class_xr(const GridField& psi, double slope_tol) {
  if (psi.size() < 3) return false;
  if (std::abs(psi.xmin) > 1e-12) return false;
  for (double v : psi.values)
    if (!(v >= 0.0)) return false;
  const GridField slope = derivative(psi);
  for (double s : slope.values)
    if (!(s <= 1e-9 && s >= -1.0 - 1e-6)) return false;
  if (std::abs(slope.values.front() + 0.5) > slope_tol) return false;
  return psi.values.back() <= 0.1;
}

bool is_class_yu(const GridField& rho, double centering_tol) {
  if (rho.size() < 3) return false;
  for (double v : rho.values)
    if (!(v > 0.0 && v < 1.0)) return false;
  if (!(rho.xmin < 0.0 && rho.xmax() > 0.0)) return false;
  const double a = ModelConstants::alpha();
  GridField one_minus(rho.xmin, rho.h, rho.values);
  for (auto& v : one_minus.values) v = 1.0 - v;
  const auto cum_hole = cumulative_trapezoid(one_minus);
  const auto cum_rho = cumulative_trapezoid(rho);
  const GridField zm(rho.xmin, rho.h, cum_hole);
  const GridField zr(rho.xmin, rho.h, cum_rho);
  const double holes_left = -std::log(rho.values.front()) / a + zm.value_at(0.0);
  const double mass_right =
      cum_rho.back() - zr.value_at(0.0) - std::log1p(-rho.values.back()) / a;
  return std::abs(holes_left - mass_right) <= centering_tol;
}

GridField solve_bhydro(const GridField& psi0, double horizon, const PdeConfig& cfg) {
  if (!is_class_xu(psi0))
    throw std::invalid_argument("solve_bhydro: initial profile fails the class predicate");
  const double a = ModelConstants::alpha();
  const GridField rho_mid = phi_u(psi0);
  const double g_lo = rho_mid.xmin;
  const double g_hi = rho_mid.xmax();
  const double big_l = cfg.domain_length;
  if (big_l <= std::max(std::abs(g_lo), std::abs(g_hi)) + 1.0)
    throw std::invalid_argument("solve_bhydro: domain_length too small for the profile");
  const auto n_ext = static_cast<std::size_t>(std::llround(2.0 * big_l / cfg.h)) + 1;
  // logistic tails matched at the edges (the class's own decay shape)
  const double q_left = (1.0 - rho_mid.values.front()) / rho_mid.values.front();
  const double q_right = rho_mid.values.back() / (1.0 - rho_mid.values.back());
  GridField rho_ext = sample_function(-big_l, cfg.h, n_ext, [&](double v) {
    if (v <= g_lo) {
      const double q = q_left * std::exp(a * (v - g_lo));
      return 1.0 / (1.0 + q);
    }
    if (v >= g_hi) {
      const double r = q_right * std::exp(-a * (v - g_hi));
      return r / (1.0 + r);
    }
    return rho_mid.value_at(v);
  });
  const GridField rho_final = solve_burgers_z(rho_ext, horizon, cfg);
  return psi_from_rho(rho_final, psi0.xmin, psi0.h, psi0.size());
}

GridField solve_fhydro(const GridField& psi0, double horizon, const PdeConfig& cfg) {
  if (!is_class_xr(psi0))
    throw std::invalid_argument("solve_fhydro: initial profile fails the class predicate");
  const double b = ModelConstants::beta();
  const double u_hi = psi0.xmax();
  const double big_l = cfg.domain_length;
  if (big_l <= u_hi) throw std::invalid_argument("solve_fhydro: domain_length too small");
  const auto n_ext = static_cast<std::size_t>(std::llround(big_l / cfg.h)) + 1;
  // in the omega picture the class tail is exactly 1 + c e^(-beta u)
  const double omega_excess = std::expm1(b * psi0.values.back());
  GridField omega0 = sample_function(0.0, cfg.h, n_ext, [&](double u) {
    if (u > u_hi) return 1.0 + omega_excess * std::exp(-b * (u - u_hi));
    return std::exp(b * psi0.value_at(u));
  });
  const GridField omega_final = solve_omega(omega0, horizon, cfg);
  const GridField psi_full = inverse_hopf_cole(omega_final, b);
  return resample(psi_full, psi0.xmin, psi0.h, psi0.size());
}

GridField residual_stationary(const GridField& psi, LimitEquation eq) {
  const std::size_t n = psi.size();
  if (n < 3) throw std::invalid_argument("residual_stationary: grid too short (< 3 points)");
  const double a = ModelConstants::alpha();
  const double b = ModelConstants::beta();
  std::vector<double> res(n - 2);
  const double h = psi.h;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double slope = (psi.values[k + 1] - psi.values[k - 1]) / (2.0 * h);
    const double curv = (psi.values[k + 1] - 2.0 * psi.values[k] + psi.values[k - 1]) / (h * h);
    if (eq == LimitEquation::BHydro) {
      const double denom = 1.0 - slope;
      res[k - 1] = curv / (denom * denom) + a * slope / denom;
    } else {
      res[k - 1] = curv + b * slope * (1.0 + slope);
    }
  }
  return GridField(psi.xmin + h, h, std::move(res));
}

GridField resample(const GridField& f, double xmin, double h, std::size_t n) {
  return sample_function(xmin, h, n, [&](double x) { return f.value_at(x); });
}

}  // namespace ydsim

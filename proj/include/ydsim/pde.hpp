#pragma once

#include <cstddef>

#include "ydsim/grid.hpp"

namespace ydsim {

// Drift constants of the two limit equations and decay rates of the limit
// shapes: alpha = pi/sqrt(6), beta = pi/sqrt(12) = alpha/sqrt(2).
struct ModelConstants {
  static double alpha();
  static double beta();
};

// Limit shapes of the two statistics (unit area):
//   psi_u(u) = -(1/alpha) log(1 - e^(-alpha u)),  u > 0
//   psi_r(u) =  (1/beta)  log(1 + e^(-beta u)),   u >= 0
double vershik_u(double u);  // rejects u <= 0 (divergent at the origin)
double vershik_r(double u);  // rejects u < 0

GridField vershik_u_field(double umin, double h, std::size_t n);
GridField vershik_r_field(double h, std::size_t n);  // starts at u = 0

// Smooth in-class perturbations of the limit shapes used by experiments
// and the transform round-trip checks; variant in {1, 2, 3}.
GridField perturbed_vershik_u(int variant, double umin, double h, std::size_t n);
GridField perturbed_vershik_r(int variant, double h, std::size_t n);

enum class Scheme { SemiImplicit, Explicit };

struct PdeConfig {
  double domain_length = 15.0;  // truncation L of the solver domain
  double h = 1e-3;
  double dt = 1e-4;
  Scheme scheme = Scheme::SemiImplicit;

  void validate(double grid_h) const;  // explicit scheme needs dt <= h^2/2
};

// d_t rho = d_v^2 rho + alpha d_v(rho(1-rho)) on the grid of rho0 (an
// interval [-L, L]), Dirichlet values frozen at both ends, conservative
// centered flux, diffusion implicit under the semi-implicit scheme.
// Values are verified to stay in [0,1] up to 1e-12; NaN aborts.
GridField solve_burgers_z(const GridField& rho0, double horizon, const PdeConfig& cfg);

// d_t omega = d_u^2 omega + beta d_u omega on [0, L] with the Robin
// condition 2 d_u omega(t,0) + beta omega(t,0) = 0 (second order via ghost
// point) and omega(L) = 1. omega0 must be >= 1; the initial Robin residual
// |2 d_u omega0(0) + beta omega0(0)| is reported if requested, not enforced.
GridField solve_omega(const GridField& omega0, double horizon, const PdeConfig& cfg,
                      double* robin_residual_out = nullptr);

// omega(u) = exp(beta int_u^inf rho), tail beyond the grid treated as zero.
GridField hopf_cole_macro(const GridField& rho, double beta);

// psi = (1/beta) log omega; rejects omega < 1 - 1e-9, never returns
// negative values.
GridField inverse_hopf_cole(const GridField& omega, double beta);

// Height picture -> density picture: G(u) = u - psi(u),
// Phi_U(psi)(v) = -psi'(G^{-1}(v)) / (1 - psi'(G^{-1}(v))).
// The default overload returns the density on the uniform grid spanning
// [G(umin), G(umax)] with the same point count as psi.
GridField phi_u(const GridField& psi);
GridField phi_u(const GridField& psi, double vmin, double h, std::size_t n);

// Density picture -> height picture:
//   zeta_minus(v) = int_{-inf}^v (1 - rho),  zeta_plus(v) = int_v^inf rho,
//   Psi_U(rho)(u) = zeta_plus(zeta_minus^{-1}(u)).
// Tail mass beyond the grid is closed with exponential tails at rate alpha.
// Rejects densities whose centering mismatch exceeds centering_tol.
GridField psi_from_rho(const GridField& rho, double umin, double h, std::size_t n,
                       double centering_tol = 1e-2);

// Grid-level class membership predicates.
bool is_class_xu(const GridField& psi);
bool is_class_xr(const GridField& psi, double slope_tol = 0.05);
bool is_class_yu(const GridField& rho, double centering_tol = 1e-2);

enum class LimitEquation { BHydro, FHydro };

// The nonlinear height equations, each solved through its transformation:
// BHydro via Phi_U / burgers / Psi_U; FHydro via Hopf-Cole / omega / log.
// The result is returned on the grid of psi0.
GridField solve_bhydro(const GridField& psi0, double horizon, const PdeConfig& cfg);
GridField solve_fhydro(const GridField& psi0, double horizon, const PdeConfig& cfg);

// Pointwise centered-difference evaluation of the equation's right side on
// the grid interior (result drops the two boundary points).
GridField residual_stationary(const GridField& psi, LimitEquation eq);

// Resample a field onto a new uniform grid by linear interpolation.
GridField resample(const GridField& f, double xmin, double h, std::size_t n);

}  // namespace ydsim

#pragma once

#include <string>
#include <vector>

#include "encl/geometry.hpp"
#include "encl/probe_fields.hpp"

namespace encl {

/// Brute-force quadrature oracles for the asymptotic claims: everything here
/// is independent of the solver stack (own subgrids, own quadratures) so it
/// can judge the pipeline rather than echo it.

enum class OracleVariant { Plane, Source, Growing };

/// log of int_D e^{2 sqrt(tau) x.omega} / e^{-2 sqrt(tau)|x-p|} /
/// e^{2 sqrt(tau)|x-y|} dx, by midpoint quadrature on an independent
/// subgrid, refined until the log value changes by < 1e-4.
double exp_integral_over_D(const InclusionScene& scene, OracleVariant variant,
                           const Point& param, double tau);

/// (sqrt(tau))^d int_{D cap B_delta(x0)} e^{-2 sqrt(tau)|x-x0|} dx.
double volume_local_integral(const Point& x0, double delta, double tau,
                       const InclusionScene& scene);

/// (sqrt(tau))^{d-1} int_{dOmega cap B_delta(y0)} e^{-sqrt(tau)|y0-y|} dS.
double surface_local_integral(const Point& y0, double delta, double tau,
                       const Domain& domain);

/// Scaled gradient energies (tau^{2mu-1} e^{2 sqrt(tau) d0} E,
/// tau^{2mu+5/2} e^{2 sqrt(tau) d0} E) with E = int_D |grad v_g|^2.
struct ScaledEnergy {
  double lambda1_scaled = 0;
  double lambda2_scaled = 0;
  double energy = 0;
};
ScaledEnergy scaled_gradient_energy(const InclusionScene& scene, const Grid& grid,
                            const ProbeField& v_g, double tau, double mu);

enum class Verdict { BoundedAbove, BoundedBelowPositive, SlopeMatch, Fail };

struct AsymptoticCheck {
  std::string name;
  std::vector<double> taus;
  std::vector<double> scaled_values;
  Verdict verdict = Verdict::Fail;
  bool pass = false;
  double target = 0;   // SlopeMatch only
  double fitted = 0;   // SlopeMatch only
  double tolerance = 0;
};

/// max <= 2 x median, all values finite.
AsymptoticCheck bounded_above_check(const std::string& name,
                                    const std::vector<double>& taus,
                                    const std::vector<double>& values);

/// min >= 0.1 x median and all values > 0.
AsymptoticCheck bounded_below_check(const std::string& name,
                                    const std::vector<double>& taus,
                                    const std::vector<double>& values);

/// Fits log q = a sqrt(tau) + b log tau + c and compares a against target.
AsymptoticCheck slope_match_check(const std::string& name,
                                  const std::vector<double>& taus,
                                  const std::vector<double>& log_values,
                                  double target, double tolerance);

/// Coefficient a of the same fit, exposed for direct use.
double fit_sqrt_tau_slope(const std::vector<double>& taus,
                          const std::vector<double>& log_values);

}  // namespace encl

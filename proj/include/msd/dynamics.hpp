#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>

#include "msd/library.hpp"
#include "msd/timeseries.hpp"

namespace msd {

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// A named benchmark system: right-hand side, parameters, canonical period,
/// and the ground-truth nonzero pattern over the degree-3 monomial basis.
struct SystemSpec {
  std::string name;
  int dim = 0;
  std::map<std::string, double> params;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> rhs;
  double period = 0.0;
  Eigen::VectorXd x0_default;
  BoolArray true_support;  // p x dim over PolynomialLibrary::make(dim, 3)

  Eigen::VectorXd eval_rhs(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(dim);
    rhs(x, out);
    return out;
  }
};

/// Linearly coupled fast/slow pair:
///   tau_fast * u' = f(u) + C v,   tau_slow * v' = g(v) + D u.
/// tau_fast = 1 so the fast period stays fixed as F varies;
/// tau_slow is chosen so that T_slow_eff / T_fast_eff = F.
struct CoupledSpec {
  SystemSpec fast;
  SystemSpec slow;
  Eigen::MatrixXd C;  // n x l
  Eigen::MatrixXd D;  // l x n
  double tau_fast = 1.0;
  double tau_slow = 1.0;
  double F = 1.0;
  SystemSpec combined;  // assembled (n+l)-state system; period = effective fast period

  double fast_period() const { return tau_fast * fast.period; }
  double slow_period() const { return tau_slow * slow.period; }
};

/// Benchmark systems: lorenz, rossler, vanderpol, duffing. Missing parameters
/// take the canonical values; unknown names or parameter keys are rejected.
SystemSpec make_system(const std::string& name, const std::map<std::string, double>& params = {});

/// kinds: vdp-vdp, slowvdp-fastlorenz, fastvdp-slowlorenz. Requires F > 1.
CoupledSpec make_coupled(const std::string& kind, double F, const Eigen::MatrixXd& C, const Eigen::MatrixXd& D);

/// Same, with the default weak coupling C = c1*E11, D = c2*E11.
CoupledSpec make_coupled(const std::string& kind, double F, double c1 = 0.25, double c2 = 0.25);

/// Fixed-step RK4 at dt = spec.period / rate. The first `transient` periods
/// are integrated and discarded; the returned series has round(rate*n_periods)
/// rows starting at t0 = transient * period. Throws on divergence.
TimeSeries simulate(const SystemSpec& spec, const Eigen::VectorXd& x0, double rate, double n_periods,
                    double transient = 10.0);
TimeSeries simulate(const SystemSpec& spec, double rate, double n_periods, double transient = 10.0);

/// Rates and periods are in units of the fast oscillation.
TimeSeries simulate(const CoupledSpec& spec, const Eigen::VectorXd& x0, double rate, double n_fast_periods,
                    double transient_fast_periods = 10.0);

/// One RK4 step, in place buffers supplied by the caller.
void rk4_step(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& rhs, Eigen::VectorXd& x, double dt,
              Eigen::VectorXd& k1, Eigen::VectorXd& k2, Eigen::VectorXd& k3, Eigen::VectorXd& k4,
              Eigen::VectorXd& tmp);

/// Empirical period of a system, integrating from x0_default with the given
/// provisional time scale. Lorenz-family systems use the mean spacing of z
/// peaks (one per lobe transit); others use upward mean-crossings of x.
double measure_period(const SystemSpec& spec, double provisional_period, double rate = 8192.0, double periods = 60.0,
                      double transient = 30.0);

}  // namespace msd

#include "msd/dynamics.hpp"

#include <cmath>
#include <stdexcept>

#include "msd/spectral.hpp"

namespace msd {

namespace {

// Canonical periods. Lorenz rho=28 (mean one-lobe transit), Van der Pol mu=5
// and Duffing delta=0 come straight from the oscillation analysis at the
// canonical parameters. The remaining entries were measured once at high
// resolution (rate 2^15, 200 cycles) and frozen.
constexpr double kLorenzPeriod = 0.759;
constexpr double kVdpPeriod = 11.45;
constexpr double kDuffingPeriod = 3.179;
constexpr double kRosslerPeriod = 0.612265;    // a=b=0.1, c=14, tau=0.1
constexpr double kLorenz160Period = 0.288016;  // rho=160 periodic regime
constexpr double kRossler85Period = 0.606553;  // c=8.5, tau=0.1

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

void check_params(const std::string& name, const std::map<std::string, double>& given,
                  const std::map<std::string, double>& defaults, std::map<std::string, double>& out) {
  out = defaults;
  for (const auto& [key, value] : given) {
    if (defaults.find(key) == defaults.end())
      throw std::invalid_argument("make_system(" + name + "): unknown parameter '" + key + "'");
    if (!std::isfinite(value))
      throw std::invalid_argument("make_system(" + name + "): parameter '" + key + "' is not finite");
    out[key] = value;
  }
}

using TermList = std::vector<std::vector<int>>;

BoolArray support_from_terms(int dim, const std::vector<TermList>& per_equation) {
  const auto lib = PolynomialLibrary::make(dim, 3);
  BoolArray support = BoolArray::Constant(lib.size(), dim, false);
  for (int eq = 0; eq < dim; ++eq)
    for (const auto& exps : per_equation[static_cast<size_t>(eq)]) support(lib.index_of(exps), eq) = true;
  return support;
}

SystemSpec make_lorenz(const std::map<std::string, double>& given) {
  SystemSpec s;
  s.name = "lorenz";
  s.dim = 3;
  check_params(s.name, given, {{"sigma", 10.0}, {"rho", 28.0}, {"beta", 8.0 / 3.0}}, s.params);
  const double sigma = s.params["sigma"], rho = s.params["rho"], beta = s.params["beta"];
  s.rhs = [sigma, rho, beta](const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dx[0] = sigma * (x[1] - x[0]);
    dx[1] = x[0] * (rho - x[2]) - x[1];
    dx[2] = x[0] * x[1] - beta * x[2];
  };
  s.x0_default = Eigen::Vector3d(-8.0, 8.0, 27.0);
  std::vector<TermList> eq(3);
  eq[0] = {{1, 0, 0}, {0, 1, 0}};                        // sigma*y - sigma*x
  eq[1] = {{1, 0, 0}, {0, 1, 0}, {1, 0, 1}};             // rho*x - y - xz
  eq[2] = {{0, 0, 1}, {1, 1, 0}};                        // xy - beta*z
  s.true_support = support_from_terms(3, eq);
  if (near(sigma, 10.0) && near(rho, 28.0) && near(beta, 8.0 / 3.0))
    s.period = kLorenzPeriod;
  else if (near(sigma, 10.0) && near(rho, 160.0) && near(beta, 8.0 / 3.0))
    s.period = kLorenz160Period;
  else
    s.period = measure_period(s, kLorenzPeriod);
  return s;
}

SystemSpec make_vanderpol(const std::map<std::string, double>& given) {
  SystemSpec s;
  s.name = "vanderpol";
  s.dim = 2;
  check_params(s.name, given, {{"mu", 5.0}}, s.params);
  const double mu = s.params["mu"];
  s.rhs = [mu](const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dx[0] = x[1];
    dx[1] = mu * (1.0 - x[0] * x[0]) * x[1] - x[0];
  };
  s.x0_default = Eigen::Vector2d(2.0, 0.0);
  std::vector<TermList> eq(2);
  eq[0] = {{0, 1}};
  eq[1] = {{1, 0}, {0, 1}, {2, 1}};                      // -x + mu*y - mu*x^2 y
  s.true_support = support_from_terms(2, eq);
  s.period = near(mu, 5.0) ? kVdpPeriod : measure_period(s, kVdpPeriod);
  return s;
}

SystemSpec make_duffing(const std::map<std::string, double>& given) {
  SystemSpec s;
  s.name = "duffing";
  s.dim = 2;
  check_params(s.name, given, {{"delta", 0.0}, {"alpha", 1.0}, {"beta", 4.0}}, s.params);
  const double delta = s.params["delta"], alpha = s.params["alpha"], beta = s.params["beta"];
  s.rhs = [delta, alpha, beta](const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dx[0] = x[1];
    dx[1] = -delta * x[1] - alpha * x[0] - beta * x[0] * x[0] * x[0];
  };
  s.x0_default = Eigen::Vector2d(1.0, 0.0);
  std::vector<TermList> eq(2);
  eq[0] = {{0, 1}};
  eq[1] = {{1, 0}, {3, 0}};
  if (delta != 0.0) eq[1].push_back({0, 1});
  s.true_support = support_from_terms(2, eq);
  s.period = (near(delta, 0.0) && near(alpha, 1.0) && near(beta, 4.0)) ? kDuffingPeriod
                                                                       : measure_period(s, kDuffingPeriod);
  return s;
}

SystemSpec make_rossler(const std::map<std::string, double>& given) {
  SystemSpec s;
  s.name = "rossler";
  s.dim = 3;
  check_params(s.name, given, {{"a", 0.1}, {"b", 0.1}, {"c", 14.0}, {"tau", 0.1}}, s.params);
  const double a = s.params["a"], b = s.params["b"], c = s.params["c"], tau = s.params["tau"];
  if (tau <= 0.0) throw std::invalid_argument("make_system(rossler): tau must be positive");
  const double inv = 1.0 / tau;
  s.rhs = [a, b, c, inv](const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    dx[0] = inv * (-x[1] - x[2]);
    dx[1] = inv * (x[0] + a * x[1]);
    dx[2] = inv * (b + x[2] * (x[0] - c));
  };
  s.x0_default = Eigen::Vector3d(1.0, 1.0, 0.0);
  std::vector<TermList> eq(3);
  eq[0] = {{0, 1, 0}, {0, 0, 1}};
  eq[1] = {{1, 0, 0}};
  if (a != 0.0) eq[1].push_back({0, 1, 0});
  eq[2] = {{0, 0, 1}, {1, 0, 1}};
  if (b != 0.0) eq[2].push_back({0, 0, 0});
  s.true_support = support_from_terms(3, eq);
  if (near(a, 0.1) && near(b, 0.1) && near(c, 14.0) && near(tau, 0.1))
    s.period = kRosslerPeriod;
  else if (near(a, 0.1) && near(b, 0.1) && near(c, 8.5) && near(tau, 0.1))
    s.period = kRossler85Period;
  else
    s.period = measure_period(s, 6.14 * tau);
  return s;
}

}  // namespace

SystemSpec make_system(const std::string& name, const std::map<std::string, double>& params) {
  if (name == "lorenz") return make_lorenz(params);
  if (name == "vanderpol") return make_vanderpol(params);
  if (name == "duffing") return make_duffing(params);
  if (name == "rossler") return make_rossler(params);
  throw std::invalid_argument("make_system: unknown system '" + name + "'");
}

void rk4_step(const std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>& rhs, Eigen::VectorXd& x, double dt,
              Eigen::VectorXd& k1, Eigen::VectorXd& k2, Eigen::VectorXd& k3, Eigen::VectorXd& k4,
              Eigen::VectorXd& tmp) {
  rhs(x, k1);
  tmp = x + 0.5 * dt * k1;
  rhs(tmp, k2);
  tmp = x + 0.5 * dt * k2;
  rhs(tmp, k3);
  tmp = x + dt * k3;
  rhs(tmp, k4);
  x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

TimeSeries simulate(const SystemSpec& spec, const Eigen::VectorXd& x0, double rate, double n_periods,
                    double transient) {
  if (rate < 2.0) throw std::invalid_argument("simulate: rate must be at least 2 samples/period");
  if (n_periods <= 0.0) throw std::invalid_argument("simulate: n_periods must be positive");
  if (transient < 0.0) throw std::invalid_argument("simulate: transient must be nonnegative");
  if (x0.size() != spec.dim) throw std::invalid_argument("simulate: initial state has wrong dimension");
  if (!x0.allFinite()) throw std::invalid_argument("simulate: initial state is not finite");

  const double dt = spec.period / rate;
  const Eigen::Index skip = static_cast<Eigen::Index>(std::llround(rate * transient));
  const Eigen::Index m = static_cast<Eigen::Index>(std::llround(rate * n_periods));
  if (m < 1) throw std::invalid_argument("simulate: window shorter than one sample");

  Eigen::VectorXd x = x0, k1(spec.dim), k2(spec.dim), k3(spec.dim), k4(spec.dim), tmp(spec.dim);
  for (Eigen::Index k = 0; k < skip; ++k) {
    rk4_step(spec.rhs, x, dt, k1, k2, k3, k4, tmp);
    if (!x.allFinite()) throw std::runtime_error("simulate: trajectory diverged during transient");
  }

  TimeSeries out;
  out.t0 = static_cast<double>(skip) * dt;
  out.dt = dt;
  out.values.resize(m, spec.dim);
  out.values.row(0) = x;
  for (Eigen::Index k = 1; k < m; ++k) {
    rk4_step(spec.rhs, x, dt, k1, k2, k3, k4, tmp);
    if (!x.allFinite()) throw std::runtime_error("simulate: trajectory diverged");
    out.values.row(k) = x;
  }
  return out;
}

TimeSeries simulate(const SystemSpec& spec, double rate, double n_periods, double transient) {
  return simulate(spec, spec.x0_default, rate, n_periods, transient);
}

TimeSeries simulate(const CoupledSpec& spec, const Eigen::VectorXd& x0, double rate, double n_fast_periods,
                    double transient_fast_periods) {
  return simulate(spec.combined, x0, rate, n_fast_periods, transient_fast_periods);
}

namespace {

SystemSpec assemble_coupled(const SystemSpec& fast, const SystemSpec& slow, const Eigen::MatrixXd& C,
                            const Eigen::MatrixXd& D, double tau_fast, double tau_slow, const std::string& kind) {
  const int n = fast.dim, l = slow.dim;
  SystemSpec s;
  s.name = kind;
  s.dim = n + l;
  s.params = {{"tau_fast", tau_fast}, {"tau_slow", tau_slow}};
  const auto f = fast.rhs;
  const auto g = slow.rhs;
  const double inv_f = 1.0 / tau_fast, inv_s = 1.0 / tau_slow;
  const Eigen::MatrixXd Cc = C, Dc = D;
  s.rhs = [n, l, f, g, Cc, Dc, inv_f, inv_s](const Eigen::VectorXd& x, Eigen::VectorXd& dx) {
    Eigen::VectorXd u = x.head(n), v = x.tail(l), du(n), dv(l);
    f(u, du);
    g(v, dv);
    dx.head(n) = inv_f * (du + Cc * v);
    dx.tail(l) = inv_s * (dv + Dc * u);
  };
  s.x0_default.resize(n + l);
  s.x0_default << fast.x0_default, slow.x0_default;
  s.period = tau_fast * fast.period;

  // combined support: each block's own terms in the extended basis, plus the
  // linear cross-coupling entries
  const auto lib = PolynomialLibrary::make(n + l, 3);
  const auto fast_lib = PolynomialLibrary::make(n, 3);
  const auto slow_lib = PolynomialLibrary::make(l, 3);
  s.true_support = BoolArray::Constant(lib.size(), n + l, false);
  for (int eq = 0; eq < n; ++eq) {
    for (Eigen::Index j = 0; j < fast_lib.size(); ++j) {
      if (!fast.true_support(j, eq)) continue;
      std::vector<int> e = fast_lib.terms[static_cast<size_t>(j)];
      e.resize(static_cast<size_t>(n + l), 0);
      s.true_support(lib.index_of(e), eq) = true;
    }
    for (int j = 0; j < l; ++j) {
      if (C(eq, j) == 0.0) continue;
      std::vector<int> e(static_cast<size_t>(n + l), 0);
      e[static_cast<size_t>(n + j)] = 1;
      s.true_support(lib.index_of(e), eq) = true;
    }
  }
  for (int eq = 0; eq < l; ++eq) {
    for (Eigen::Index j = 0; j < slow_lib.size(); ++j) {
      if (!slow.true_support(j, eq)) continue;
      std::vector<int> e(static_cast<size_t>(n + l), 0);
      for (int i = 0; i < l; ++i) e[static_cast<size_t>(n + i)] = slow_lib.terms[static_cast<size_t>(j)][static_cast<size_t>(i)];
      s.true_support(lib.index_of(e), n + eq) = true;
    }
    for (int j = 0; j < n; ++j) {
      if (D(eq, j) == 0.0) continue;
      std::vector<int> e(static_cast<size_t>(n + l), 0);
      e[static_cast<size_t>(j)] = 1;
      s.true_support(lib.index_of(e), n + eq) = true;
    }
  }
  return s;
}

}  // namespace

CoupledSpec make_coupled(const std::string& kind, double F, const Eigen::MatrixXd& C, const Eigen::MatrixXd& D) {
  if (F <= 1.0) throw std::invalid_argument("make_coupled: frequency ratio F must exceed 1");
  CoupledSpec spec;
  if (kind == "vdp-vdp") {
    spec.fast = make_system("vanderpol");
    spec.slow = make_system("vanderpol");
  } else if (kind == "slowvdp-fastlorenz") {
    spec.fast = make_system("lorenz");
    spec.slow = make_system("vanderpol");
  } else if (kind == "fastvdp-slowlorenz") {
    spec.fast = make_system("vanderpol");
    spec.slow = make_system("lorenz");
  } else {
    throw std::invalid_argument("make_coupled: unknown kind '" + kind + "'");
  }
  if (C.rows() != spec.fast.dim || C.cols() != spec.slow.dim)
    throw std::invalid_argument("make_coupled: C must be fast_dim x slow_dim");
  if (D.rows() != spec.slow.dim || D.cols() != spec.fast.dim)
    throw std::invalid_argument("make_coupled: D must be slow_dim x fast_dim");
  if (!C.allFinite() || !D.allFinite()) throw std::invalid_argument("make_coupled: coupling matrices must be finite");

  spec.C = C;
  spec.D = D;
  spec.F = F;
  spec.tau_fast = 1.0;
  spec.tau_slow = F * spec.fast.period / spec.slow.period;
  spec.combined = assemble_coupled(spec.fast, spec.slow, C, D, spec.tau_fast, spec.tau_slow, kind);
  return spec;
}

CoupledSpec make_coupled(const std::string& kind, double F, double c1, double c2) {
  int n = 2, l = 2;
  if (kind == "slowvdp-fastlorenz") n = 3;
  if (kind == "fastvdp-slowlorenz") l = 3;
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, l);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(l, n);
  C(0, 0) = c1;
  D(0, 0) = c2;
  return make_coupled(kind, F, C, D);
}

double measure_period(const SystemSpec& spec, double provisional_period, double rate, double periods,
                      double transient) {
  const double dt = provisional_period / rate;
  const Eigen::Index skip = static_cast<Eigen::Index>(std::llround(rate * transient));
  const Eigen::Index m = static_cast<Eigen::Index>(std::llround(rate * periods));
  Eigen::VectorXd x = spec.x0_default, k1(spec.dim), k2(spec.dim), k3(spec.dim), k4(spec.dim), tmp(spec.dim);
  for (Eigen::Index k = 0; k < skip; ++k) {
    rk4_step(spec.rhs, x, dt, k1, k2, k3, k4, tmp);
    if (!x.allFinite()) throw std::runtime_error("measure_period: trajectory diverged");
  }
  Eigen::VectorXd signal(m);
  const bool use_peaks = spec.name == "lorenz";
  const Eigen::Index channel = use_peaks ? 2 : 0;
  for (Eigen::Index k = 0; k < m; ++k) {
    signal[k] = x[channel];
    rk4_step(spec.rhs, x, dt, k1, k2, k3, k4, tmp);
    if (!x.allFinite()) throw std::runtime_error("measure_period: trajectory diverged");
  }
  return use_peaks ? period_from_peaks(signal, dt) : period_from_upcrossings(signal, dt);
}

}  // namespace msd

#include "rydeit/spectra_fit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "rydeit/kernels.hpp"
#include "rydeit/units.hpp"

namespace rydeit {

namespace {

std::string at_detuning(const std::exception& e, double delta) {
  std::ostringstream msg;
  msg << e.what() << " (at delta_p = " << delta << " MHz)";
  return msg.str();
}

template <typename F>
Susceptibility with_context(double delta, F&& f) {
  try {
    return f();
  } catch (const NumericalError& e) {
    throw NumericalError(at_detuning(e, delta));
  }
}

}  // namespace

Spectrum sweep_spectrum(const ModelSelector& model, const LaserParams& lasers, const AtomParams& atom,
                        const CloudParams& cloud, std::span<const double> grid, const NumericalSettings& numerics,
                        Execution execution) {
  if (grid.empty()) throw std::invalid_argument("sweep_spectrum: empty detuning grid");
  if (!std::is_sorted(grid.begin(), grid.end()) || std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
    throw std::invalid_argument("sweep_spectrum: detuning grid must be strictly increasing");
  }
  cloud.validate();

  auto at = [&](std::size_t i) {
    LaserParams l = lasers;
    l.delta_p = grid[i];
    return l;
  };

  if (const auto* ion = std::get_if<IonModel>(&model)) {
    auto mc = ion->montecarlo;
    mc.execution = execution;
    return run_ion_montecarlo(lasers, atom, ion->state, cloud, grid, mc, numerics).spectrum;
  }

  std::vector<Susceptibility> chi;
  if (std::holds_alternative<SingleModel>(model)) {
    chi = kernels::evaluate(execution, grid.size(), [&](std::size_t i) {
      return with_context(grid[i], [&] { return single_atom_susceptibility(at(i), atom, cloud.density, numerics); });
    });
  } else if (const auto* pair = std::get_if<PairModel>(&model)) {
    chi = kernels::evaluate(execution, grid.size(), [&](std::size_t i) {
      return with_context(grid[i], [&] {
        return pair_susceptibility(at(i), atom, pair->interaction, cloud.density, numerics);
      });
    });
  } else {
    // Parallelism lives inside the quadrature; the grid is walked in order.
    const auto& ens = std::get<EnsembleModel>(model);
    auto quad = ens.quadrature;
    quad.execution = execution;
    chi.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      chi[i] = with_context(grid[i], [&] { return ensemble_susceptibility(at(i), atom, ens.state, cloud, quad, numerics).chi; });
    }
  }
  return make_spectrum(SweepVariable::detuning_mhz, grid, chi, cloud);
}

DensityFit fit_density(std::span<const double> delta_mhz, std::span<const double> transmission,
                       std::span<const double> sigma, const DensityFitSettings& settings) {
  const std::size_t n = delta_mhz.size();
  if (transmission.size() != n || (!sigma.empty() && sigma.size() != n)) {
    throw std::invalid_argument("fit_density: column lengths differ");
  }
  if (n < 4) throw std::invalid_argument("fit_density: need at least 4 points");
  const auto [lo, hi] = std::minmax_element(delta_mhz.begin(), delta_mhz.end());
  if (*hi - *lo < 4.0 * settings.gamma_e) throw std::invalid_argument("fit_density: spectrum must span >= 4 linewidths");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(transmission[i] > 0.0) || !std::isfinite(transmission[i])) throw std::invalid_argument("fit_density: transmission must be positive");
    if (!sigma.empty() && !(sigma[i] > 0.0)) throw std::invalid_argument("fit_density: sigma must be positive");
  }

  const auto [tmin, tmax] = std::minmax_element(transmission.begin(), transmission.end());
  if (*tmax - *tmin < 1e-6) throw FitError("fit_density: degenerate (flat) spectrum");

  const double gamma = settings.gamma_e;
  Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  if (!sigma.empty()) {
    for (std::size_t i = 0; i < n; ++i) w(i) = 1.0 / sigma[i];
  }

  // Parameters: peak optical depth and line center.
  auto residuals = [&](const Eigen::Vector2d& p, Eigen::MatrixXd* jac) {
    Eigen::VectorXd r(n);
    if (jac) jac->resize(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
      const double x = 2.0 * (delta_mhz[i] - p(1)) / gamma;
      const double lor = 1.0 / (1.0 + x * x);
      const double t = std::exp(-p(0) * lor);
      r(i) = w(i) * (t - transmission[i]);
      if (jac) {
        (*jac)(i, 0) = w(i) * (-lor * t);
        // d lor / d c = 2 x lor^2 (2 / gamma)
        (*jac)(i, 1) = w(i) * (-p(0) * t * lor * lor * 4.0 * x / gamma);
      }
    }
    return r;
  };

  const auto kmin = static_cast<std::size_t>(tmin - transmission.begin());
  Eigen::Vector2d p(-std::log(*tmin), delta_mhz[kmin]);

  // Damped Gauss-Newton (Levenberg-Marquardt); steps are accepted only if the cost drops.
  Eigen::MatrixXd jac;
  Eigen::VectorXd r = residuals(p, &jac);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  int it = 0;
  bool converged = false;
  for (; it < settings.max_iterations && !converged; ++it) {
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    const Eigen::Vector2d g = jac.transpose() * r;
    bool accepted = false;
    while (!accepted && lambda < 1e12) {
      Eigen::Matrix2d a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-30);
      const Eigen::Vector2d step = a.ldlt().solve(-g);
      const Eigen::Vector2d trial = p + step;
      const Eigen::VectorXd rt = residuals(trial, nullptr);
      const double ct = rt.squaredNorm();
      if (std::isfinite(ct) && ct <= cost) {
        converged = step.cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + p.cwiseAbs().maxCoeff()) ||
                    cost - ct <= 1e-15 * cost;
        p = trial;
        r = residuals(p, &jac);
        cost = r.squaredNorm();
        lambda = std::max(lambda * 0.3, 1e-12);
        accepted = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) converged = true;  // no downhill step left: at a minimum to machine precision
  }
  if (!converged) throw FitError("fit_density: no convergence within the iteration limit");

  Eigen::Matrix2d jtj = jac.transpose() * jac;
  Eigen::FullPivLU<Eigen::Matrix2d> lu(jtj);
  if (!lu.isInvertible()) throw FitError("fit_density: singular Jacobian");
  Eigen::Matrix2d cov = lu.inverse();
  if (sigma.empty()) cov *= cost / static_cast<double>(n - 2);

  const double scale = resonant_cross_section(settings.lambda_p) * settings.path_length;
  DensityFit out;
  out.density = p(0) / scale;
  out.center = p(1);
  out.density_sigma = std::sqrt(cov(0, 0)) / scale;
  out.center_sigma = std::sqrt(cov(1, 1));
  out.iterations = it;
  out.residuals.resize(n);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.residuals[i] = r(i) / w(i);
    ss += out.residuals[i] * out.residuals[i];
  }
  out.rms_residual = std::sqrt(ss / static_cast<double>(n));
  return out;
}

Chi3Fit fit_chi3(std::span<const Chi3Point> points, double cutoff_field, bool degenerate_kerr_factor) {
  std::vector<Chi3Point> used;
  for (const auto& p : points) {
    if (p.field <= cutoff_field) used.push_back(p);
  }
  if (used.size() < 3) throw std::invalid_argument("fit_chi3: need at least 3 points below the cutoff");

  const auto m = static_cast<Eigen::Index>(used.size());
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = used[i].field * used[i].field;
    y(i) = used[i].chi_i;
  }
  // Column scaling keeps the QR rank test meaningful when E^2 ~ 1e2..1e3.
  const Eigen::Vector2d scale(1.0, 1.0 / a.col(1).cwiseAbs().maxCoeff());
  const Eigen::MatrixXd as = a * scale.asDiagonal();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(as);
  qr.setThreshold(1e-10);
  if (qr.rank() < 2) throw FitError("fit_chi3: rank-deficient design (need distinct fields)");
  const Eigen::Vector2d coef = scale.cwiseProduct(qr.solve(y));

  Chi3Fit out;
  out.chi1_im = coef(0);
  out.chi3_im = degenerate_kerr_factor ? coef(1) * 4.0 / 3.0 : coef(1);
  out.cutoff_field = cutoff_field;
  out.points = used.size();
  out.residual = std::sqrt((a * coef - y).squaredNorm() / static_cast<double>(m));
  return out;
}

}  // namespace rydeit

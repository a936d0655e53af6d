#include "beamsweep/array_model.hpp"

#include <cmath>

namespace beamsweep {

namespace {

std::complex<double> draw_cn(Rng& rng, double variance) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  double re = n(rng);
  double im = n(rng);
  return {re, im};
}

// Stationary Rician state: deterministic mean m with diffuse power 1/(1+K),
// so E|alpha|^2 = 1.
std::complex<double> stationary_fading(Rng& rng, const FadingModel& model) {
  if (model.mode == FadingMode::kStatic) return {1.0, 0.0};
  double k = model.rician_k_factor;
  double mean = std::sqrt(k / (1.0 + k));
  return mean + draw_cn(rng, 1.0 / (1.0 + k));
}

}  // namespace

Eigen::VectorXcd steering_vector(double theta, const ArrayConfig& cfg) {
  const int m = cfg.m_antennas;
  Eigen::VectorXcd a(m);
  const double phase_step = 2.0 * M_PI * cfg.spacing_ratio * std::cos(theta);
  for (int k = 0; k < m; ++k) {
    a(k) = std::polar(1.0, phase_step * k);
  }
  if (cfg.normalize_steering) a /= std::sqrt(static_cast<double>(m));
  return a;
}

PathSet sample_paths(Rng& rng, int k_paths, Interval theta_range, double attenuation_db,
                     const FadingModel& fading) {
  if (k_paths < 1) throw std::invalid_argument("sample_paths: k_paths must be >= 1");
  std::uniform_real_distribution<double> aoa(theta_range.lo, theta_range.hi);
  PathSet set;
  set.paths.reserve(k_paths);
  set.dominant_index = 0;

  Path dominant;
  dominant.aoa = aoa(rng);
  dominant.power = 1.0;
  dominant.fading = stationary_fading(rng, fading);
  set.paths.push_back(dominant);

  const double side_power = db_to_linear(-attenuation_db);
  for (int k = 1; k < k_paths; ++k) {
    Path p;
    p.aoa = aoa(rng);
    p.power = side_power;
    p.fading = stationary_fading(rng, fading);
    set.paths.push_back(p);
  }
  return set;
}

PathSet advance_fading(PathSet state, const FadingModel& model, Rng& rng) {
  if (model.mode == FadingMode::kStatic) return state;
  const double rho = model.ar_coefficient;
  const double k = model.rician_k_factor;
  const double mean = std::sqrt(k / (1.0 + k));
  const double scale = std::sqrt(1.0 - rho * rho);
  // Innovation mean chosen so the stationary mean stays at the Rician LOS
  // component; diffuse innovation variance keeps stationary power at 1.
  const double inno_mean = mean * std::sqrt((1.0 - rho) / (1.0 + rho));
  for (auto& p : state.paths) {
    std::complex<double> inno = inno_mean + draw_cn(rng, 1.0 / (1.0 + k));
    p.fading = rho * p.fading + scale * inno;
  }
  return state;
}

Eigen::VectorXcd channel_vector(const PathSet& paths, const ArrayConfig& cfg) {
  if (paths.paths.empty()) throw std::invalid_argument("channel_vector: empty PathSet");
  Eigen::VectorXcd h = Eigen::VectorXcd::Zero(cfg.m_antennas);
  for (const auto& p : paths.paths) {
    h += p.fading * std::sqrt(p.power) * steering_vector(p.aoa, cfg);
  }
  return h;
}

double observe_reward(const Eigen::VectorXcd& w, const Eigen::VectorXcd& h, double sigma2,
                      Rng& rng) {
  if (w.size() != h.size()) throw std::invalid_argument("observe_reward: dimension mismatch");
  if (std::abs(w.norm() - 1.0) > 1e-9) {
    throw std::invalid_argument("observe_reward: beamforming vector must be unit norm");
  }
  std::complex<double> s = w.dot(h);
  if (sigma2 > 0.0) s += draw_cn(rng, sigma2);
  return std::norm(s);
}

}  // namespace beamsweep

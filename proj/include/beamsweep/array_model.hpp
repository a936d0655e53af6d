#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "beamsweep/common.hpp"

namespace beamsweep {

// Uniform linear array geometry. spacing_ratio is element spacing over
// wavelength (d/lambda). When normalize_steering is set the steering vector
// is scaled by 1/sqrt(M).
struct ArrayConfig {
  int m_antennas = 128;
  double spacing_ratio = 0.5;
  bool normalize_steering = false;
};

struct Path {
  double aoa = 0.0;                       // radians
  double power = 1.0;                     // linear
  std::complex<double> fading = {1.0, 0.0};
};

struct PathSet {
  std::vector<Path> paths;
  int dominant_index = 0;
};

enum class FadingMode { kStatic, kRicianAr1 };

struct FadingModel {
  FadingMode mode = FadingMode::kStatic;
  double ar_coefficient = 0.995;
  double rician_k_factor = 10.0;
};

struct NoiseModel {
  double sigma2 = 1.0;
  static NoiseModel from_snr_db(double snr_db) { return {db_to_linear(-snr_db)}; }
};

// One propagation environment: paths, noise power, fading law.
struct ChannelScenario {
  PathSet paths;
  double sigma2 = 1.0;
  FadingModel fading;
};

Eigen::VectorXcd steering_vector(double theta, const ArrayConfig& cfg);

// Dominant path uniform in theta_range with power 1; the remaining
// k_paths - 1 paths i.i.d. uniform, attenuation_db down.
PathSet sample_paths(Rng& rng, int k_paths, Interval theta_range, double attenuation_db,
                     const FadingModel& fading = {});

PathSet advance_fading(PathSet state, const FadingModel& model, Rng& rng);

Eigen::VectorXcd channel_vector(const PathSet& paths, const ArrayConfig& cfg);

// y = |w^H h + n|^2 with n circularly-symmetric complex Gaussian of
// variance sigma2. Requires unit-norm w.
double observe_reward(const Eigen::VectorXcd& w, const Eigen::VectorXcd& h, double sigma2,
                      Rng& rng);

}  // namespace beamsweep

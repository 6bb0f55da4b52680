#pragma once

#include <vector>

#include <Eigen/Dense>

#include "openkrotov/dynamics.hpp"

namespace openkrotov {

/// K(omega) = value for omega_min <= |omega| <= omega_max.
struct SpectralBand {
  double omega_min = 0.0;
  double omega_max = 0.0;
  double value = 0.0;

  bool operator==(const SpectralBand&) const = default;
};

/// Band list plus penalty weight, independent of any particular grid.
struct SpectralSpec {
  std::vector<SpectralBand> bands;
  double alpha = 1.0;

  bool operator==(const SpectralSpec&) const = default;
};

/// Angular frequency of DFT bin k for N samples over duration T:
/// 2 pi k / T for k <= N/2, 2 pi (k - N) / T above.
double dft_frequency(Index k, Index n, double t_final);

/// Nonnegative filter spectrum sampled on the DFT bins of a control grid,
/// with penalty weight alpha.
///
/// Transforms use the unitary convention X_k = N^{-1/2} sum_n x_n e^{-2 pi i k n / N}.
class SpectralFilter {
 public:
  SpectralFilter(TimeGrid grid, std::vector<double> kernel, double alpha);
  static SpectralFilter from_spec(const SpectralSpec& spec, const TimeGrid& grid);
  /// Several constraints act through 1 + sum_i alpha_i K_i.
  static SpectralFilter compose(const std::vector<SpectralFilter>& filters);

  const TimeGrid& grid() const { return grid_; }
  const std::vector<double>& kernel() const { return kernel_; }
  double alpha() const { return alpha_; }

 private:
  TimeGrid grid_;
  std::vector<double> kernel_;
  double alpha_;
};

/// Unitary DFT of real samples.
std::vector<std::complex<double>> unitary_dft(const std::vector<double>& x);

/// dt * sum_k K_k |X_k|^2, the discrete form of
/// (1/2pi) int int du(t) K(t - t') du(t') dt dt'.
double spectral_penalty(const SpectralFilter& filter, const std::vector<double>& delta_u);

/// X_k / (1 + alpha K_k), transformed back to the time grid.
std::vector<double> filtered_update(const SpectralFilter& filter,
                                    const std::vector<double>& raw_update);

/// Fraction of sum_k |X_k|^2 carried by bins where the kernel is positive.
double stopband_power_fraction(const SpectralFilter& filter, const std::vector<double>& samples);

}  // namespace openkrotov

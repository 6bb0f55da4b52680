#include "openkrotov/spectral.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

namespace openkrotov {

namespace {

void require_grid(const SpectralFilter& filter, std::size_t n) {
  if (static_cast<Index>(n) != filter.grid().n_steps()) {
    throw DimensionError("update has " + std::to_string(n) + " samples, filter grid has " +
                         std::to_string(filter.grid().n_steps()));
  }
}

}  // namespace

double dft_frequency(Index k, Index n, double t_final) {
  const Index shifted = (2 * k <= n) ? k : k - n;
  return 2.0 * std::numbers::pi * static_cast<double>(shifted) / t_final;
}

SpectralFilter::SpectralFilter(TimeGrid grid, std::vector<double> kernel, double alpha)
    : grid_(grid), kernel_(std::move(kernel)), alpha_(alpha) {
  const Index n = grid_.n_steps();
  if (static_cast<Index>(kernel_.size()) != n) {
    throw DimensionError("filter kernel size differs from the number of control samples");
  }
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
    throw std::invalid_argument("spectral penalty weight must be positive");
  }
  for (Index k = 0; k < n; ++k) {
    const double v = kernel_[static_cast<std::size_t>(k)];
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("filter kernel must be >= 0");
    const Index mirror = (n - k) % n;
    if (std::abs(v - kernel_[static_cast<std::size_t>(mirror)]) > 0.0) {
      throw std::invalid_argument("filter kernel must be symmetric in +/- omega");
    }
  }
}

SpectralFilter SpectralFilter::from_spec(const SpectralSpec& spec, const TimeGrid& grid) {
  for (const auto& b : spec.bands) {
    if (!(b.omega_min >= 0.0) || !(b.omega_max >= b.omega_min)) {
      throw std::invalid_argument("spectral band needs 0 <= omega_min <= omega_max");
    }
    if (!(b.value >= 0.0)) throw std::invalid_argument("spectral band value must be >= 0");
  }
  const Index n = grid.n_steps();
  std::vector<double> kernel(static_cast<std::size_t>(n), 0.0);
  for (Index k = 0; k < n; ++k) {
    // |omega| is evaluated on the symmetric bin so both signs get one value
    const Index sym = std::min(k, n - k);
    const double w = std::abs(dft_frequency(sym, n, grid.t_final()));
    for (const auto& b : spec.bands) {
      if (w >= b.omega_min && w <= b.omega_max) {
        kernel[static_cast<std::size_t>(k)] = std::max(kernel[static_cast<std::size_t>(k)], b.value);
      }
    }
  }
  return SpectralFilter(grid, std::move(kernel), spec.alpha);
}

SpectralFilter SpectralFilter::compose(const std::vector<SpectralFilter>& filters) {
  if (filters.empty()) throw std::invalid_argument("nothing to compose");
  const TimeGrid& grid = filters.front().grid();
  double alpha = 0.0;
  for (const auto& f : filters) {
    if (!(f.grid() == grid)) throw DimensionError("composed filters must share one grid");
    alpha += f.alpha();
  }
  std::vector<double> kernel(filters.front().kernel().size(), 0.0);
  for (const auto& f : filters) {
    for (std::size_t k = 0; k < kernel.size(); ++k) kernel[k] += f.alpha() * f.kernel()[k] / alpha;
  }
  return SpectralFilter(grid, std::move(kernel), alpha);
}

std::vector<std::complex<double>> unitary_dft(const std::vector<double>& x) {
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> out;
  fft.fwd(out, x);
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (auto& v : out) v *= scale;
  return out;
}

double spectral_penalty(const SpectralFilter& filter, const std::vector<double>& delta_u) {
  require_grid(filter, delta_u.size());
  const auto spectrum = unitary_dft(delta_u);
  double sum = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) sum += filter.kernel()[k] * std::norm(spectrum[k]);
  return filter.grid().dt() * sum;
}

std::vector<double> filtered_update(const SpectralFilter& filter,
                                    const std::vector<double>& raw_update) {
  require_grid(filter, raw_update.size());
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, raw_update);
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    spectrum[k] /= 1.0 + filter.alpha() * filter.kernel()[k];
  }
  std::vector<std::complex<double>> back;
  fft.inv(back, spectrum);
  std::vector<double> out(back.size());
  for (std::size_t i = 0; i < back.size(); ++i) out[i] = back[i].real();
  return out;
}

double stopband_power_fraction(const SpectralFilter& filter, const std::vector<double>& samples) {
  require_grid(filter, samples.size());
  const auto spectrum = unitary_dft(samples);
  double total = 0.0;
  double stop = 0.0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double p = std::norm(spectrum[k]);
    total += p;
    if (filter.kernel()[k] > 0.0) stop += p;
  }
  return total > 0.0 ? stop / total : 0.0;
}

}  // namespace openkrotov

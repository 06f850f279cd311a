#include "hdcdist/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include "hdcdist/errors.hpp"

namespace hdcdist::spectral {
namespace {

// Eigen's FFT caches twiddle tables per length; one engine per thread keeps
// that cache race-free.
Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> fft;
  return fft;
}

}  // namespace

Spectrum forward(std::span<const double> x) {
  Spectrum out;
  engine().fwd(out, std::vector<double>(x.begin(), x.end()));
  return out;
}

std::vector<double> inverse_real(const Spectrum& spectrum) {
  Spectrum full;
  engine().inv(full, spectrum);
  std::vector<double> out(full.size());
  for (std::size_t i = 0; i < full.size(); ++i) out[i] = full[i].real();
  return out;
}

Spectrum multiply(const Spectrum& a, const Spectrum& b) {
  if (a.size() != b.size()) throw DimensionError("spectrum length mismatch");
  Spectrum out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

}  // namespace hdcdist::spectral

#pragma once

// DFT helpers shared by circular convolution and the HRR codec. Works for
// any length, including primes.

#include <complex>
#include <span>
#include <vector>

namespace hdcdist::spectral {

using Spectrum = std::vector<std::complex<double>>;

Spectrum forward(std::span<const double> x);
std::vector<double> inverse_real(const Spectrum& spectrum);

// Element-wise product of two spectra of equal length.
Spectrum multiply(const Spectrum& a, const Spectrum& b);

}  // namespace hdcdist::spectral

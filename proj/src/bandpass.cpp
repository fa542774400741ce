#include "biobench/bandpass.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace biobench::signal {

void BandSpec::validate(int sample_rate) const {
  const double nyquist = sample_rate / 2.0;
  if (!(0.0 < f_low && f_low < f_high && f_high < nyquist)) {
    throw std::invalid_argument("band edges must satisfy 0 < f_low < f_high < Nyquist");
  }
}

Eigen::ArrayXd design_bandpass_fir(const BandSpec& band, int sample_rate,
                                   int taps) {
  band.validate(sample_rate);
  if (taps < 3 || taps % 2 == 0) {
    throw std::invalid_argument("taps must be odd and >= 3");
  }
  const double w1 = 2.0 * std::numbers::pi * band.f_low / sample_rate;
  const double w2 = 2.0 * std::numbers::pi * band.f_high / sample_rate;
  const int mid = (taps - 1) / 2;

  Eigen::ArrayXd h(taps);
  for (int n = 0; n < taps; ++n) {
    const int d = n - mid;
    double ideal;
    if (d == 0) {
      ideal = (w2 - w1) / std::numbers::pi;
    } else {
      ideal = (std::sin(w2 * d) - std::sin(w1 * d)) / (std::numbers::pi * d);
    }
    const double hamming =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (taps - 1));
    h[n] = ideal * hamming;
  }
  return h;
}

double fir_response_db(const Eigen::ArrayXd& taps, double freq_hz,
                       int sample_rate) {
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
  std::complex<double> acc = 0.0;
  for (Eigen::Index n = 0; n < taps.size(); ++n) {
    acc += taps[n] * std::polar(1.0, -w * static_cast<double>(n));
  }
  return 20.0 * std::log10(std::abs(acc) + 1e-300);
}

namespace {

// Mirror an out-of-range index back into [0, n): ... 2 1 | 0 1 2 ... n-1 | n-2 ...
Eigen::Index mirror_index(Eigen::Index i, Eigen::Index n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

}  // namespace

Eigen::ArrayXd convolve_reflect(const Eigen::ArrayXd& x,
                                const Eigen::ArrayXd& taps) {
  const Eigen::Index n = x.size();
  const Eigen::Index t = taps.size();
  if (n == 0) return x;
  const Eigen::Index pad = (t - 1) / 2;

  Eigen::ArrayXd padded(n + 2 * pad);
  padded.segment(pad, n) = x;
  for (Eigen::Index k = 0; k < pad; ++k) {
    padded[pad - 1 - k] = x[mirror_index(k + 1, n)];
    padded[pad + n + k] = x[mirror_index(n - 2 - k, n)];
  }

  // y[i] = sum_k taps[k] * padded[i + (t-1) - k]; for the symmetric
  // linear-phase designs used here taps are palindromic, so the reversed
  // kernel equals the kernel and each output is a plain dot product.
  Eigen::ArrayXd rev = taps.reverse();
  Eigen::ArrayXd y(n);
  const auto revm = rev.matrix();
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = revm.dot(padded.segment(i, t).matrix());
  }
  return y;
}

Waveform bandpass_filter(const Waveform& w, const BandSpec& band) {
  validate(w);
  band.validate(w.sample_rate);
  const Eigen::ArrayXd h = design_bandpass_fir(band, w.sample_rate);
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.samples = convolve_reflect(w.samples, h);
  return out;
}

}  // namespace biobench::signal

#include "biobench/stft.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace biobench::signal {

void StftParams::validate() const {
  if (fft_size <= 0 || (fft_size & (fft_size - 1)) != 0) {
    throw std::invalid_argument("fft_size must be a positive power of two");
  }
  if (hop <= 0 || hop > fft_size) {
    throw std::invalid_argument("hop must satisfy 0 < hop <= fft_size");
  }
  // Constant-overlap-add check on the squared analysis window: the
  // overlapped window power must be flat over one period.
  const Eigen::ArrayXd win = hann_window(fft_size);
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(fft_size);
  for (int shift = -fft_size; shift <= fft_size; shift += hop) {
    for (int n = 0; n < fft_size; ++n) {
      const int j = n - shift;
      if (j >= 0 && j < fft_size) acc[n] += win[j] * win[j];
    }
  }
  const double lo = acc.minCoeff();
  const double hi = acc.maxCoeff();
  if (lo <= 0.0 || (hi - lo) / hi > 1e-3) {
    throw std::invalid_argument("window/hop pair violates constant-overlap-add");
  }
}

Eigen::ArrayXd hann_window(int n) {
  Eigen::ArrayXd w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / n));
  }
  return w;
}

SpectralFrames stft(const Waveform& w, const StftParams& params) {
  params.validate();
  const Eigen::Index n = w.samples.size();
  const int fft_size = params.fft_size;
  const int hop = params.hop;
  if (n < fft_size) {
    throw std::invalid_argument("waveform shorter than fft_size");
  }

  // Centered analysis: half a window of zeros on each side keeps the
  // window-power sum well away from zero over every real sample, so the
  // inverse stays stable even for heavily modified frames.
  const Eigen::Index lead = fft_size / 2;
  const Eigen::Index num_frames = 1 + (n + hop - 1) / hop;
  const Eigen::Index padded = (num_frames - 1) * hop + fft_size;
  Eigen::ArrayXd x = Eigen::ArrayXd::Zero(padded);
  x.segment(lead, n) = w.samples;

  const Eigen::ArrayXd win = hann_window(fft_size);

  SpectralFrames out;
  out.params = params;
  out.original_length = n;
  out.sample_rate = w.sample_rate;
  out.frames.resize(num_frames, params.num_bins());

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(static_cast<std::size_t>(fft_size));
  std::vector<std::complex<double>> spectrum;
  for (Eigen::Index m = 0; m < num_frames; ++m) {
    for (int i = 0; i < fft_size; ++i) {
      frame[static_cast<std::size_t>(i)] = x[m * hop + i] * win[i];
    }
    fft.fwd(spectrum, frame);
    for (int k = 0; k < params.num_bins(); ++k) {
      out.frames(m, k) = spectrum[static_cast<std::size_t>(k)];
    }
  }
  return out;
}

Waveform istft(const SpectralFrames& s) {
  s.params.validate();
  const int fft_size = s.params.fft_size;
  const int hop = s.params.hop;
  if (s.frames.cols() != s.params.num_bins()) {
    throw std::invalid_argument("frame width inconsistent with fft_size");
  }
  const Eigen::Index num_frames = s.frames.rows();
  if (num_frames == 0) {
    throw std::invalid_argument("no frames to invert");
  }

  const Eigen::Index padded = (num_frames - 1) * hop + fft_size;
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(padded);
  Eigen::ArrayXd norm = Eigen::ArrayXd::Zero(padded);
  const Eigen::ArrayXd win = hann_window(fft_size);
  const Eigen::ArrayXd win_sq = win * win;

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(s.params.num_bins()));
  std::vector<double> frame;
  for (Eigen::Index m = 0; m < num_frames; ++m) {
    for (int k = 0; k < s.params.num_bins(); ++k) {
      spectrum[static_cast<std::size_t>(k)] = s.frames(m, k);
    }
    fft.inv(frame, spectrum, fft_size);
    for (int i = 0; i < fft_size; ++i) {
      acc[m * hop + i] += frame[static_cast<std::size_t>(i)] * win[i];
      norm[m * hop + i] += win_sq[i];
    }
  }

  const Eigen::Index lead = fft_size / 2;
  Eigen::Index out_len = s.original_length > 0 ? s.original_length : padded;
  if (out_len > padded - lead) out_len = padded - lead;
  Waveform w;
  w.sample_rate = s.sample_rate;
  w.samples.resize(out_len);
  for (Eigen::Index i = 0; i < out_len; ++i) {
    const Eigen::Index j = lead + i;
    w.samples[i] = norm[j] > 1e-12 ? acc[j] / norm[j] : 0.0;
  }
  return w;
}

Eigen::ArrayXd mean_periodogram(const SpectralFrames& s) {
  if (s.frames.rows() == 0) {
    throw std::invalid_argument("no frames");
  }
  return s.frames.array().abs2().colwise().mean().transpose();
}

}  // namespace biobench::signal

#ifndef BIOBENCH_STFT_HPP
#define BIOBENCH_STFT_HPP

#include <Eigen/Dense>

#include "biobench/waveform.hpp"

namespace biobench::signal {

/// Short-time Fourier transform parameters. fft_size must be a power of
/// two and the window/hop pair must satisfy constant-overlap-add so the
/// inverse transform reconstructs exactly.
struct StftParams {
  enum class Window { Hann };

  int fft_size = 1024;
  int hop = 256;
  Window window = Window::Hann;

  int num_bins() const { return fft_size / 2 + 1; }
  void validate() const;
};

/// Complex STFT frames: one row per frame, fft_size/2+1 columns.
/// original_length is the pre-padding sample count istft() trims back to.
struct SpectralFrames {
  Eigen::MatrixXcd frames;
  StftParams params;
  Eigen::Index original_length = 0;
  int sample_rate = 22050;

  Eigen::Index num_frames() const { return frames.rows(); }
};

/// Periodic Hann window of length n.
Eigen::ArrayXd hann_window(int n);

/// Windowed FFT per frame, linear magnitude scaling. The tail is
/// zero-padded so every sample is covered by at least one frame.
/// Throws if the waveform is shorter than fft_size.
SpectralFrames stft(const Waveform& w, const StftParams& params = {});

/// Weighted overlap-add inverse with per-sample window-power
/// normalization; output is trimmed to original_length.
Waveform istft(const SpectralFrames& s);

/// Mean of |X|^2 across frames, one value per bin.
Eigen::ArrayXd mean_periodogram(const SpectralFrames& s);

/// Center frequency in Hz of bin k.
inline double bin_frequency_hz(int k, int fft_size, int sample_rate) {
  return static_cast<double>(k) * sample_rate / fft_size;
}

}  // namespace biobench::signal

#endif  // BIOBENCH_STFT_HPP

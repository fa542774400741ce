#ifndef BIOBENCH_BANDPASS_HPP
#define BIOBENCH_BANDPASS_HPP

#include <Eigen/Dense>

#include "biobench/waveform.hpp"

namespace biobench::signal {

/// Passband edges in Hz. Valid when 0 < f_low < f_high < sample_rate/2.
struct BandSpec {
  double f_low = 0.0;
  double f_high = 0.0;

  void validate(int sample_rate) const;
};

inline constexpr int kFirTaps = 511;

/// Windowed-sinc (Hamming) linear-phase bandpass design, `taps` odd.
Eigen::ArrayXd design_bandpass_fir(const BandSpec& band, int sample_rate,
                                   int taps = kFirTaps);

/// Magnitude response of an FIR at a single frequency, in dB.
double fir_response_db(const Eigen::ArrayXd& taps, double freq_hz,
                       int sample_rate);

/// Length-preserving convolution with symmetric-reflection edge padding;
/// the filter's group delay is compensated so the output is aligned with
/// the input (zero net phase for linear-phase taps).
Eigen::ArrayXd convolve_reflect(const Eigen::ArrayXd& x,
                                const Eigen::ArrayXd& taps);

/// Zero-phase FIR bandpass; output length equals input length.
Waveform bandpass_filter(const Waveform& w, const BandSpec& band);

}  // namespace biobench::signal

#endif  // BIOBENCH_BANDPASS_HPP

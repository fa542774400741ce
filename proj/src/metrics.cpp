#include "biobench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "biobench/enhance.hpp"

namespace biobench::metrics {

double seg_snr(const Waveform& signal_est, const Waveform& noise_est,
               Eigen::Index frame_len, bool clamp) {
  if (signal_est.samples.size() != noise_est.samples.size()) {
    throw std::invalid_argument("signal/noise length mismatch");
  }
  if (signal_est.samples.size() < frame_len) {
    throw std::invalid_argument("input shorter than one frame");
  }
  const Eigen::MatrixXd s = signal::frame_signal(signal_est, frame_len, frame_len);
  const Eigen::MatrixXd n = signal::frame_signal(noise_est, frame_len, frame_len);

  double acc = 0.0;
  for (Eigen::Index m = 0; m < s.rows(); ++m) {
    const double se = s.row(m).squaredNorm();
    const double ne = n.row(m).squaredNorm();
    double db = 10.0 * std::log10(se / (ne + kSegSnrEpsilon));
    if (clamp) db = std::clamp(db, -20.0, 35.0);
    acc += db;
  }
  return acc / static_cast<double>(s.rows());
}

double proxy_seg_snr(const Waveform& w) {
  auto [s_est, n_est] = enhance::split_signal_noise_proxy(w);
  return seg_snr(s_est, n_est);
}

double snr_improvement(const Waveform& before, const Waveform& after) {
  if (before.samples.size() != after.samples.size()) {
    throw std::invalid_argument("before/after length mismatch");
  }
  return proxy_seg_snr(after) - proxy_seg_snr(before);
}

double isd(const Waveform& reference, const Waveform& test,
           const StftParams& stft_params) {
  if (reference.samples.size() != test.samples.size()) {
    throw std::invalid_argument("reference/test length mismatch");
  }
  constexpr double kPowerFloor = 1e-10;
  const signal::SpectralFrames ref = signal::stft(reference, stft_params);
  const signal::SpectralFrames tst = signal::stft(test, stft_params);

  double acc = 0.0;
  for (Eigen::Index m = 0; m < ref.frames.rows(); ++m) {
    for (Eigen::Index k = 0; k < ref.frames.cols(); ++k) {
      const double pr = std::max(std::norm(ref.frames(m, k)), kPowerFloor);
      const double pt = std::max(std::norm(tst.frames(m, k)), kPowerFloor);
      const double ratio = pr / pt;
      acc += ratio - std::log(ratio) - 1.0;
    }
  }
  return acc / static_cast<double>(ref.frames.rows() * ref.frames.cols());
}

Eigen::Matrix<double, FeatureVector::kDims, 1> FeatureVector::as_vector() const {
  Eigen::Matrix<double, kDims, 1> v;
  v << mean_amp, std_amp, max_abs_amp, mean_abs_amp, zcr, mean_mag, std_mag,
      dom_freq_pos, total_spec_energy, spectral_centroid_hz;
  return v;
}

FeatureVector FeatureVector::from_vector(
    const Eigen::Matrix<double, kDims, 1>& v) {
  FeatureVector f;
  f.mean_amp = v[0];
  f.std_amp = v[1];
  f.max_abs_amp = v[2];
  f.mean_abs_amp = v[3];
  f.zcr = v[4];
  f.mean_mag = v[5];
  f.std_mag = v[6];
  f.dom_freq_pos = v[7];
  f.total_spec_energy = v[8];
  f.spectral_centroid_hz = v[9];
  return f;
}

FeatureVector extract_features(const Waveform& w, const StftParams& stft_params) {
  validate(w);
  const Eigen::ArrayXd& x = w.samples;
  const auto n = static_cast<double>(x.size());

  FeatureVector f;
  f.mean_amp = x.mean();
  f.std_amp = std::sqrt((x - f.mean_amp).square().sum() / n);
  f.max_abs_amp = x.abs().maxCoeff();
  f.mean_abs_amp = x.abs().mean();
  if (x.size() > 1) {
    Eigen::Index crossings = 0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
      if (x[i] * x[i + 1] < 0.0) ++crossings;
    }
    f.zcr = static_cast<double>(crossings) / static_cast<double>(x.size() - 1);
  }

  // Spectral descriptors come from the frame-averaged magnitude spectrum;
  // short inputs are zero-padded to a single analysis frame.
  Waveform padded = w;
  if (padded.samples.size() < stft_params.fft_size) {
    Eigen::ArrayXd tmp = Eigen::ArrayXd::Zero(stft_params.fft_size);
    tmp.head(padded.samples.size()) = padded.samples;
    padded.samples = std::move(tmp);
  }
  const signal::SpectralFrames frames = signal::stft(padded, stft_params);
  const Eigen::ArrayXd mag =
      frames.frames.array().abs().colwise().mean().transpose();

  const auto bins = static_cast<double>(mag.size());
  f.mean_mag = mag.mean();
  f.std_mag = std::sqrt((mag - f.mean_mag).square().sum() / bins);
  f.total_spec_energy = mag.square().sum();

  const double mag_sum = mag.sum();
  if (mag_sum > 0.0) {
    Eigen::Index dom = 0;
    mag.maxCoeff(&dom);
    f.dom_freq_pos = static_cast<double>(dom) / (bins - 1.0);
    double weighted = 0.0;
    for (Eigen::Index k = 0; k < mag.size(); ++k) {
      weighted += signal::bin_frequency_hz(static_cast<int>(k),
                                           stft_params.fft_size, w.sample_rate) *
                  mag[k];
    }
    f.spectral_centroid_hz = weighted / mag_sum;
  }
  return f;
}

}  // namespace biobench::metrics

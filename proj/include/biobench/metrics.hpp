#ifndef BIOBENCH_METRICS_HPP
#define BIOBENCH_METRICS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "biobench/stft.hpp"
#include "biobench/waveform.hpp"

namespace biobench::metrics {

using signal::StftParams;
using signal::Waveform;

inline constexpr double kSegSnrEpsilon = 1e-10;
inline constexpr Eigen::Index kSegSnrFrameLen = 1024;

/// Segmental SNR in dB: mean over non-overlapping frames of
/// 10 log10(sum s^2 / (sum n^2 + eps)). Optionally clamps each frame to
/// [-20, 35] dB, the speech-enhancement convention (off by default).
double seg_snr(const Waveform& signal_est, const Waveform& noise_est,
               Eigen::Index frame_len = kSegSnrFrameLen, bool clamp = false);

/// Segmental SNR of a clip under the 2-8 kHz proxy decomposition.
double proxy_seg_snr(const Waveform& w);

/// proxy_seg_snr(after) - proxy_seg_snr(before).
double snr_improvement(const Waveform& before, const Waveform& after);

/// Itakura-Saito distance between power spectra, averaged over STFT
/// frames and bins: P_ref/P_test - ln(P_ref/P_test) - 1, both spectra
/// floored at 1e-10. Asymmetric; pass the original signal first.
double isd(const Waveform& reference, const Waveform& test,
           const StftParams& stft = {});

/// Ten temporal/spectral descriptors of one clip.
struct FeatureVector {
  static constexpr int kDims = 10;

  // temporal
  double mean_amp = 0.0;
  double std_amp = 0.0;
  double max_abs_amp = 0.0;
  double mean_abs_amp = 0.0;
  double zcr = 0.0;
  // spectral (from the frame-averaged magnitude spectrum)
  double mean_mag = 0.0;
  double std_mag = 0.0;
  double dom_freq_pos = 0.0;
  double total_spec_energy = 0.0;
  double spectral_centroid_hz = 0.0;

  Eigen::Matrix<double, kDims, 1> as_vector() const;
  static FeatureVector from_vector(const Eigen::Matrix<double, kDims, 1>& v);
};

FeatureVector extract_features(const Waveform& w, const StftParams& stft = {});

/// Per-dimension histogram settings for the feature-distribution metrics.
/// Ranges are pooled over both sample sets; logs are base 2, so each
/// dimension's divergence lies in [0, 1].
struct HistogramSpec {
  int bins_per_dim = 50;
};

/// Jensen-Shannon divergence between two feature sets, averaged across
/// the ten dimensions. Degenerate dimensions (zero pooled range)
/// contribute 0.
double jsd_features(const std::vector<FeatureVector>& real,
                    const std::vector<FeatureVector>& gen,
                    const HistogramSpec& spec = {});

inline constexpr std::uint64_t kNdbDefaultSeed = 0x5eedbeefcafef00dULL;

/// Number of statistically-different bins: k-means bins fitted on the
/// real set (k-means++ init from the given seed), both sets assigned to
/// the nearest centroid, and a two-proportion z-test per bin at the given
/// two-sided significance level. Dimensions are standardized by the real
/// set's statistics before clustering.
int ndb(const std::vector<FeatureVector>& real,
        const std::vector<FeatureVector>& gen, int k = 20, double alpha = 0.05,
        std::uint64_t seed = kNdbDefaultSeed);

/// Gaussian moments of an embedding set (rows = samples).
struct GaussianFit {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // unbiased, symmetrized
};

GaussianFit fit_gaussian(const Eigen::MatrixXd& embeddings);

/// Frechet distance between two Gaussian fits:
/// |mu_a - mu_b|^2 + tr(Sa + Sb - 2 (Sa^1/2 Sb Sa^1/2)^1/2),
/// matrix square roots via symmetric eigendecomposition with negative
/// eigenvalues clamped to zero; the result is clamped to >= 0.
double frechet_distance(const GaussianFit& a, const GaussianFit& b);

}  // namespace biobench::metrics

#endif  // BIOBENCH_METRICS_HPP

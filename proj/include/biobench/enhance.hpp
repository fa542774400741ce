#ifndef BIOBENCH_ENHANCE_HPP
#define BIOBENCH_ENHANCE_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "biobench/bandpass.hpp"
#include "biobench/stft.hpp"
#include "biobench/waveform.hpp"

namespace biobench::enhance {

using signal::BandSpec;
using signal::StftParams;
using signal::Waveform;

/// The four overlapping analysis bands covering typical bird-call energy,
/// from low-mid vocalizations up to high-frequency components.
const std::vector<BandSpec>& default_bands();

/// Union of the default analysis bands, used to score how much "call-like"
/// energy a segment carries.
inline constexpr BandSpec kCallBandUnion{1500.0, 11000.0};

/// Broad passband treated as the signal proxy when no ground truth exists.
inline constexpr BandSpec kProxyBand{2000.0, 8000.0};

struct MabeConfig {
  std::vector<BandSpec> bands = default_bands();
  double weight_floor = 0.1;
  double alpha_min = 1.0;
  double alpha_max = 3.0;
  double snr_lo_db = 0.0;
  double snr_hi_db = 20.0;
  double noise_win_s = 0.5;
  double noise_hop_s = 0.25;
  double spectral_floor_beta = 0.01;
  double normalize_ceiling = 0.99;
  StftParams stft;

  void validate() const;
};

enum class Method { Mabe, SpecSub, MmseStsa, MmseLsa };

std::string method_id(Method m);       // stable token, e.g. "mabe"
std::string method_display(Method m);  // e.g. "MABE"

struct EnhancementResult {
  Waveform enhanced;
  std::vector<std::pair<BandSpec, double>> band_weights;
  double snr_est_db = 0.0;
  double alpha_prime = 1.0;
  std::pair<Eigen::Index, Eigen::Index> noise_ref_span{0, 0};
  Method method = Method::Mabe;
  // Set when the noise estimate had to fall back to the whole clip.
  bool degenerate_noise_estimate = false;
};

struct NoisePsdEstimate {
  enum class Source { InitialFrames, ReferenceFragment };
  Eigen::ArrayXd psd;  // per-bin power, fft_size/2+1 entries
  Source source = Source::InitialFrames;
};

/// Heuristic decomposition of a raw clip: the 2-8 kHz bandpass output is
/// treated as signal, the residual as noise. s_est + n_est == x exactly.
std::pair<Waveform, Waveform> split_signal_noise_proxy(const Waveform& x);

/// Weight of one analysis band: its share of the total energy (floored)
/// boosted by tonality, w = max(floor, E_band/E_total) * (2 - flatness).
/// Flatness is the geometric/arithmetic mean ratio of the band signal's
/// frame-averaged power spectrum over the in-band bins (1 for an empty
/// spectrum, so dead bands fall back to the floor).
double adaptive_weight(const Waveform& band_signal, const Waveform& x,
                       const BandSpec& band, double weight_floor = 0.1,
                       const StftParams& stft = {});

/// Convex combination of the band signals with normalized weights, plus
/// the exact residual r = x - s_est.
std::pair<Waveform, Waveform> reconstruct_weighted(
    const Waveform& x, const std::vector<Waveform>& band_signals,
    const std::vector<double>& weights);

/// Piecewise-linear over-subtraction strength: alpha_max at and below the
/// low SNR anchor, alpha_min at and above the high anchor, linear between.
double adapt_strength(double snr_est_db, const MabeConfig& cfg);

/// Slides windows over the residual and returns the one with the smallest
/// fraction of its energy inside the call-band union (ties -> earliest).
/// Inputs shorter than one window are returned whole. The span is
/// [first, last) in samples.
std::pair<std::pair<Eigen::Index, Eigen::Index>, Waveform>
select_noise_reference(const Waveform& residual, const MabeConfig& cfg = {});

/// Mean periodogram of a fragment, for use as a noise PSD.
NoisePsdEstimate estimate_noise_psd(const Waveform& fragment,
                                    NoisePsdEstimate::Source source,
                                    const StftParams& stft = {});

/// Classic power-domain spectral subtraction with an over-subtraction
/// factor and a relative spectral floor:
///   |S|^2 = max(|X|^2 - alpha * P_noise, beta * |X|^2),
/// noisy phase reused. Output length equals input length.
Waveform spectral_subtract(const Waveform& target,
                           const NoisePsdEstimate& noise_psd, double alpha,
                           double beta, const StftParams& stft = {});

/// Multi-band adaptive enhancement: band decomposition with adaptive
/// weights, weighted reconstruction, SNR-adapted spectral subtraction of
/// the residual against an automatically selected noise reference, and
/// clip-preventing normalization of the recombined signal.
EnhancementResult mabe_enhance(const Waveform& x, const MabeConfig& cfg = {});

/// Full-spectrum spectral subtraction baseline: noise PSD from the first
/// 0.25 s, alpha = 2, beta = 0.01.
EnhancementResult specsub_baseline(const Waveform& x,
                                   const StftParams& stft = {});

enum class MmseMode { Stsa, Lsa };

/// Ephraim-Malah short-time amplitude estimators (STSA or log-spectral)
/// with decision-directed a-priori SNR tracking; noise PSD from the first
/// 0.25 s, gains clamped to [1e-3, 1].
EnhancementResult mmse_enhance(const Waveform& x, MmseMode mode,
                               const StftParams& stft = {});

}  // namespace biobench::enhance

#endif  // BIOBENCH_ENHANCE_HPP

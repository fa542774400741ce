#include "biobench/enhance.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "biobench/metrics.hpp"
#include "biobench/mmse.hpp"

namespace biobench::enhance {

const std::vector<BandSpec>& default_bands() {
  static const std::vector<BandSpec> bands = {
      {1500.0, 3000.0}, {2500.0, 5000.0}, {4000.0, 8000.0}, {7000.0, 11000.0}};
  return bands;
}

void MabeConfig::validate() const {
  if (bands.empty()) throw std::invalid_argument("bands must be non-empty");
  if (!(alpha_min <= alpha_max)) {
    throw std::invalid_argument("alpha_min must not exceed alpha_max");
  }
  if (!(spectral_floor_beta > 0.0 && spectral_floor_beta < 1.0)) {
    throw std::invalid_argument("spectral floor must be in (0, 1)");
  }
  if (!(noise_hop_s > 0.0 && noise_hop_s <= noise_win_s)) {
    throw std::invalid_argument("noise hop must be in (0, noise window]");
  }
  if (!(weight_floor > 0.0)) {
    throw std::invalid_argument("weight floor must be positive");
  }
  if (!(snr_lo_db < snr_hi_db)) {
    throw std::invalid_argument("SNR anchors must satisfy lo < hi");
  }
  if (!(normalize_ceiling > 0.0 && normalize_ceiling <= 1.0)) {
    throw std::invalid_argument("normalize ceiling must be in (0, 1]");
  }
  stft.validate();
}

std::string method_id(Method m) {
  switch (m) {
    case Method::Mabe: return "mabe";
    case Method::SpecSub: return "specsub";
    case Method::MmseStsa: return "mmse_stsa";
    case Method::MmseLsa: return "mmse_lsa";
  }
  return "unknown";
}

std::string method_display(Method m) {
  switch (m) {
    case Method::Mabe: return "MABE";
    case Method::SpecSub: return "Spectral Subtraction";
    case Method::MmseStsa: return "MMSE-STSA";
    case Method::MmseLsa: return "MMSE-LSA";
  }
  return "unknown";
}

namespace {

// Segmental SNR is -inf when a frame of the signal estimate is digital
// silence; pin such estimates to a finite sentinel so strength adaptation
// and serialized diagnostics stay well-defined.
double finite_db(double db) {
  if (std::isfinite(db)) return db;
  return std::signbit(db) ? -999.0 : 999.0;
}

}  // namespace

std::pair<Waveform, Waveform> split_signal_noise_proxy(const Waveform& x) {
  Waveform s_est = signal::bandpass_filter(x, kProxyBand);
  Waveform n_est;
  n_est.sample_rate = x.sample_rate;
  n_est.samples = x.samples - s_est.samples;
  return {std::move(s_est), std::move(n_est)};
}

namespace {

// Geometric over arithmetic mean of the in-band power bins; 1 for an
// empty spectrum so that silent bands read as perfectly flat.
double spectral_flatness_in_band(const Waveform& band_signal,
                                 const BandSpec& band,
                                 const StftParams& stft_params) {
  constexpr double kPowerFloor = 1e-30;
  const Eigen::ArrayXd psd =
      signal::mean_periodogram(signal::stft(band_signal, stft_params));
  double log_acc = 0.0;
  double lin_acc = 0.0;
  int count = 0;
  for (int k = 0; k < psd.size(); ++k) {
    const double f =
        signal::bin_frequency_hz(k, stft_params.fft_size, band_signal.sample_rate);
    if (f < band.f_low || f > band.f_high) continue;
    const double p = std::max(psd[k], kPowerFloor);
    log_acc += std::log(p);
    lin_acc += p;
    ++count;
  }
  if (count == 0) return 1.0;
  const double arithmetic = lin_acc / count;
  if (arithmetic <= kPowerFloor) return 1.0;
  const double geometric = std::exp(log_acc / count);
  return std::min(geometric / arithmetic, 1.0);
}

}  // namespace

double adaptive_weight(const Waveform& band_signal, const Waveform& x,
                       const BandSpec& band, double weight_floor,
                       const StftParams& stft_params) {
  if (band_signal.samples.size() != x.samples.size()) {
    throw std::invalid_argument("band signal and input lengths differ");
  }
  const double band_energy = band_signal.samples.square().sum();
  const double total_energy = x.samples.square().sum();
  const double fraction =
      total_energy > 0.0 ? band_energy / total_energy : 0.0;
  const double flatness =
      spectral_flatness_in_band(band_signal, band, stft_params);
  return std::max(weight_floor, fraction) * (1.0 + (1.0 - flatness));
}

std::pair<Waveform, Waveform> reconstruct_weighted(
    const Waveform& x, const std::vector<Waveform>& band_signals,
    const std::vector<double>& weights) {
  if (band_signals.empty() || band_signals.size() != weights.size()) {
    throw std::invalid_argument("band/weight count mismatch");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("weights must be non-negative");
    total += w;
  }
  if (total <= 0.0) {
    throw std::invalid_argument("at least one weight must be positive");
  }

  Waveform s_est;
  s_est.sample_rate = x.sample_rate;
  s_est.samples = Eigen::ArrayXd::Zero(x.samples.size());
  for (std::size_t i = 0; i < band_signals.size(); ++i) {
    if (band_signals[i].samples.size() != x.samples.size()) {
      throw std::invalid_argument("band signal length differs from input");
    }
    s_est.samples += (weights[i] / total) * band_signals[i].samples;
  }
  Waveform residual;
  residual.sample_rate = x.sample_rate;
  residual.samples = x.samples - s_est.samples;
  return {std::move(s_est), std::move(residual)};
}

double adapt_strength(double snr_est_db, const MabeConfig& cfg) {
  if (!std::isfinite(snr_est_db)) {
    throw std::invalid_argument("SNR estimate must be finite");
  }
  if (snr_est_db <= cfg.snr_lo_db) return cfg.alpha_max;
  if (snr_est_db >= cfg.snr_hi_db) return cfg.alpha_min;
  const double t =
      (snr_est_db - cfg.snr_lo_db) / (cfg.snr_hi_db - cfg.snr_lo_db);
  return cfg.alpha_max + t * (cfg.alpha_min - cfg.alpha_max);
}

std::pair<std::pair<Eigen::Index, Eigen::Index>, Waveform>
select_noise_reference(const Waveform& residual, const MabeConfig& cfg) {
  validate(residual);
  const auto win =
      static_cast<Eigen::Index>(std::lround(cfg.noise_win_s * residual.sample_rate));
  const auto hop =
      static_cast<Eigen::Index>(std::lround(cfg.noise_hop_s * residual.sample_rate));
  const Eigen::Index n = residual.samples.size();
  if (n < win || win <= 0) {
    return {{0, n}, residual};
  }

  const Waveform in_band = signal::bandpass_filter(residual, kCallBandUnion);

  double best_score = std::numeric_limits<double>::infinity();
  Eigen::Index best_start = 0;
  for (Eigen::Index start = 0; start + win <= n; start += hop) {
    const double total = residual.samples.segment(start, win).square().sum();
    const double call = in_band.samples.segment(start, win).square().sum();
    const double score = call / (total + 1e-30);
    if (score < best_score) {
      best_score = score;
      best_start = start;
    }
  }

  Waveform fragment;
  fragment.sample_rate = residual.sample_rate;
  fragment.samples = residual.samples.segment(best_start, win);
  return {{best_start, best_start + win}, std::move(fragment)};
}

NoisePsdEstimate estimate_noise_psd(const Waveform& fragment,
                                    NoisePsdEstimate::Source source,
                                    const StftParams& stft_params) {
  NoisePsdEstimate est;
  est.source = source;
  est.psd = signal::mean_periodogram(signal::stft(fragment, stft_params));
  return est;
}

Waveform spectral_subtract(const Waveform& target,
                           const NoisePsdEstimate& noise_psd, double alpha,
                           double beta, const StftParams& stft_params) {
  if (alpha < 0.0) throw std::invalid_argument("alpha must be >= 0");
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw std::invalid_argument("beta must be in [0, 1)");
  }
  signal::SpectralFrames frames = signal::stft(target, stft_params);
  if (noise_psd.psd.size() != frames.frames.cols()) {
    throw std::invalid_argument("noise PSD bin count does not match STFT");
  }

  for (Eigen::Index m = 0; m < frames.frames.rows(); ++m) {
    for (Eigen::Index k = 0; k < frames.frames.cols(); ++k) {
      const std::complex<double> bin = frames.frames(m, k);
      const double power = std::norm(bin);
      const double cleaned =
          std::max(power - alpha * noise_psd.psd[k], beta * power);
      if (power > 0.0) {
        frames.frames(m, k) = bin * std::sqrt(cleaned / power);
      }
    }
  }
  return signal::istft(frames);
}

EnhancementResult mabe_enhance(const Waveform& x, const MabeConfig& cfg) {
  validate(x);
  cfg.validate();
  if (x.samples.size() < cfg.stft.fft_size) {
    throw std::invalid_argument("input shorter than one analysis frame");
  }

  std::vector<Waveform> band_signals;
  std::vector<double> weights;
  band_signals.reserve(cfg.bands.size());
  weights.reserve(cfg.bands.size());
  for (const BandSpec& band : cfg.bands) {
    band_signals.push_back(signal::bandpass_filter(x, band));
    weights.push_back(adaptive_weight(band_signals.back(), x, band,
                                      cfg.weight_floor, cfg.stft));
  }

  auto [s_est, residual] = reconstruct_weighted(x, band_signals, weights);

  const double snr_est = finite_db(metrics::seg_snr(s_est, residual));
  const double alpha_prime = adapt_strength(snr_est, cfg);
  auto [span, fragment] = select_noise_reference(residual, cfg);
  const NoisePsdEstimate noise_psd = estimate_noise_psd(
      fragment, NoisePsdEstimate::Source::ReferenceFragment, cfg.stft);
  const Waveform residual_clean = spectral_subtract(
      residual, noise_psd, alpha_prime, cfg.spectral_floor_beta, cfg.stft);

  Waveform recombined;
  recombined.sample_rate = x.sample_rate;
  recombined.samples = s_est.samples + residual_clean.samples;

  EnhancementResult result;
  result.enhanced = signal::peak_normalize(recombined, cfg.normalize_ceiling);
  for (std::size_t i = 0; i < cfg.bands.size(); ++i) {
    result.band_weights.emplace_back(cfg.bands[i], weights[i]);
  }
  result.snr_est_db = snr_est;
  result.alpha_prime = alpha_prime;
  result.noise_ref_span = span;
  result.method = Method::Mabe;
  return result;
}

namespace {

// Noise PSD from the leading quarter second (the conventional
// initial-silence assumption); falls back to the whole clip when shorter.
NoisePsdEstimate initial_noise_psd(const Waveform& x,
                                   const StftParams& stft_params,
                                   std::pair<Eigen::Index, Eigen::Index>* span,
                                   bool* degenerate) {
  const auto lead =
      static_cast<Eigen::Index>(std::lround(0.25 * x.sample_rate));
  Eigen::Index take = std::min(lead, x.samples.size());
  *degenerate = take < lead;
  if (take < stft_params.fft_size) {
    take = x.samples.size();
    *degenerate = true;
  }
  Waveform prefix;
  prefix.sample_rate = x.sample_rate;
  prefix.samples = x.samples.head(take);
  *span = {0, take};
  return estimate_noise_psd(prefix, NoisePsdEstimate::Source::InitialFrames,
                            stft_params);
}

}  // namespace

EnhancementResult specsub_baseline(const Waveform& x,
                                   const StftParams& stft_params) {
  validate(x);
  if (x.samples.size() < stft_params.fft_size) {
    throw std::invalid_argument("input shorter than one analysis frame");
  }
  constexpr double kAlpha = 2.0;
  constexpr double kBeta = 0.01;

  EnhancementResult result;
  result.method = Method::SpecSub;
  const NoisePsdEstimate psd = initial_noise_psd(
      x, stft_params, &result.noise_ref_span, &result.degenerate_noise_estimate);
  result.enhanced = spectral_subtract(x, psd, kAlpha, kBeta, stft_params);
  result.alpha_prime = kAlpha;
  result.snr_est_db = finite_db(metrics::proxy_seg_snr(x));
  return result;
}

EnhancementResult mmse_enhance(const Waveform& x, MmseMode mode,
                               const StftParams& stft_params) {
  validate(x);
  if (x.samples.size() < stft_params.fft_size) {
    throw std::invalid_argument("input shorter than one analysis frame");
  }
  constexpr double kDdSmoothing = 0.98;
  constexpr double kGainFloor = 1e-3;
  const double xi_floor = std::pow(10.0, -25.0 / 10.0);

  EnhancementResult result;
  result.method = mode == MmseMode::Stsa ? Method::MmseStsa : Method::MmseLsa;
  const NoisePsdEstimate noise = initial_noise_psd(
      x, stft_params, &result.noise_ref_span, &result.degenerate_noise_estimate);

  signal::SpectralFrames frames = signal::stft(x, stft_params);
  const Eigen::Index bins = frames.frames.cols();
  Eigen::ArrayXd prev_clean_power = Eigen::ArrayXd::Zero(bins);

  for (Eigen::Index m = 0; m < frames.frames.rows(); ++m) {
    for (Eigen::Index k = 0; k < bins; ++k) {
      const std::complex<double> bin = frames.frames(m, k);
      const double power = std::norm(bin);
      if (power < 1e-30) {
        prev_clean_power[k] = 0.0;
        continue;  // dead bin, nothing to estimate
      }
      const double lambda = std::max(noise.psd[k], 1e-20);
      const double gamma = power / lambda;
      double xi;
      if (m == 0) {
        xi = kDdSmoothing + (1.0 - kDdSmoothing) * std::max(gamma - 1.0, 0.0);
      } else {
        xi = kDdSmoothing * prev_clean_power[k] / lambda +
             (1.0 - kDdSmoothing) * std::max(gamma - 1.0, 0.0);
      }
      xi = std::max(xi, xi_floor);

      double gain = mode == MmseMode::Stsa ? stsa_gain(xi, gamma)
                                           : lsa_gain(xi, gamma);
      gain = std::clamp(gain, kGainFloor, 1.0);
      frames.frames(m, k) = bin * gain;
      prev_clean_power[k] = gain * gain * power;
    }
  }
  result.enhanced = signal::istft(frames);
  result.snr_est_db = finite_db(metrics::proxy_seg_snr(x));
  return result;
}

}  // namespace biobench::enhance

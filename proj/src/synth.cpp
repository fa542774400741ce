#include "biobench/synth.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "biobench/metrics.hpp"
#include "biobench/stft.hpp"

namespace biobench::synth {

std::string envelope_name(Envelope e) {
  return e == Envelope::Hann ? "hann" : "exponential";
}

Envelope envelope_from_name(const std::string& name) {
  if (name == "hann") return Envelope::Hann;
  if (name == "exponential") return Envelope::Exponential;
  throw std::invalid_argument("unknown envelope: " + name);
}

std::string noise_kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::White: return "white";
    case NoiseKind::Pink: return "pink";
    case NoiseKind::LowHum: return "low_hum";
  }
  return "unknown";
}

NoiseKind noise_kind_from_name(const std::string& name) {
  if (name == "white") return NoiseKind::White;
  if (name == "pink") return NoiseKind::Pink;
  if (name == "low_hum") return NoiseKind::LowHum;
  throw std::invalid_argument("unknown noise kind: " + name);
}

void CallSpec::validate(int sample_rate, double clip_s) const {
  const double nyquist = sample_rate / 2.0;
  if (!(f_start_hz > 0.0 && f_start_hz < nyquist) ||
      !(f_end_hz > 0.0 && f_end_hz < nyquist)) {
    throw std::invalid_argument("sweep endpoints must lie in (0, Nyquist)");
  }
  if (n_harmonics < 1 ||
      std::max(f_start_hz, f_end_hz) * n_harmonics >= nyquist) {
    throw std::invalid_argument("harmonics exceed Nyquist");
  }
  if (syllable_count < 1 || syllable_len_s <= 0.0 || gap_len_s < 0.0) {
    throw std::invalid_argument("invalid syllable layout");
  }
  const double train =
      syllable_count * syllable_len_s + (syllable_count - 1) * gap_len_s;
  if (train > clip_s) {
    throw std::invalid_argument("syllable train longer than clip");
  }
  if (!(amplitude >= 0.0 && amplitude <= 1.0)) {
    throw std::invalid_argument("amplitude must be in [0, 1]");
  }
}

const std::vector<CallSpec>& call_presets() {
  static const std::vector<CallSpec> presets = {
      {2200.0, 2800.0, 1, 4, 0.18, 0.12, Envelope::Hann, 0.30, 0},
      {3200.0, 2400.0, 2, 3, 0.22, 0.15, Envelope::Exponential, 0.28, 0},
      {4500.0, 5200.0, 1, 5, 0.12, 0.10, Envelope::Hann, 0.32, 0},
      {2600.0, 4100.0, 2, 2, 0.30, 0.20, Envelope::Hann, 0.26, 0},
      {5500.0, 4800.0, 1, 6, 0.10, 0.08, Envelope::Exponential, 0.30, 0},
      {1900.0, 2300.0, 3, 3, 0.20, 0.14, Envelope::Hann, 0.25, 0},
      {7200.0, 8200.0, 1, 4, 0.15, 0.12, Envelope::Hann, 0.28, 0},
      {3800.0, 3300.0, 2, 4, 0.16, 0.11, Envelope::Exponential, 0.30, 0},
      {6100.0, 6900.0, 1, 3, 0.24, 0.16, Envelope::Hann, 0.27, 0},
      {2900.0, 3600.0, 3, 2, 0.28, 0.18, Envelope::Exponential, 0.26, 0},
      {8300.0, 7400.0, 1, 5, 0.11, 0.09, Envelope::Hann, 0.29, 0},
      {4200.0, 4900.0, 2, 3, 0.19, 0.13, Envelope::Hann, 0.31, 0},
  };
  return presets;
}

namespace {

// Pinned uniform/normal draws so corpora are reproducible across standard
// library implementations.
double canonical_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng) {
  double u1 = canonical_double(rng);
  while (u1 <= 0.0) u1 = canonical_double(rng);
  const double u2 = canonical_double(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::Index next_pow2(Eigen::Index n) {
  Eigen::Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

Waveform gen_call(const CallSpec& spec, int sample_rate, double clip_s) {
  spec.validate(sample_rate, clip_s);
  const auto total = static_cast<Eigen::Index>(std::lround(clip_s * sample_rate));
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples = Eigen::ArrayXd::Zero(total);
  if (spec.amplitude == 0.0) return w;

  std::mt19937_64 rng(spec.seed);
  const auto syl_len =
      static_cast<Eigen::Index>(std::lround(spec.syllable_len_s * sample_rate));
  const auto gap_len =
      static_cast<Eigen::Index>(std::lround(spec.gap_len_s * sample_rate));
  const Eigen::Index train =
      spec.syllable_count * syl_len + (spec.syllable_count - 1) * gap_len;
  const Eigen::Index lead = (total - train) / 2;

  for (int s = 0; s < spec.syllable_count; ++s) {
    // Small per-syllable frequency jitter keeps repeated syllables from
    // being bit-identical while staying inside the target band.
    const double j0 = 1.0 + 0.02 * (2.0 * canonical_double(rng) - 1.0);
    const double j1 = 1.0 + 0.02 * (2.0 * canonical_double(rng) - 1.0);
    const double f0 = spec.f_start_hz * j0;
    const double f1 = spec.f_end_hz * j1;
    const Eigen::Index start = lead + s * (syl_len + gap_len);
    const double dur = static_cast<double>(syl_len) / sample_rate;

    for (Eigen::Index i = 0; i < syl_len; ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      // Linear sweep: phase is the integral of the instantaneous frequency.
      const double phase = 2.0 * std::numbers::pi *
                           (f0 * t + 0.5 * (f1 - f0) * t * t / dur);
      double env;
      if (spec.envelope == Envelope::Hann) {
        env = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / syl_len));
      } else {
        env = std::exp(-3.0 * t / dur);
      }
      double v = 0.0;
      for (int h = 1; h <= spec.n_harmonics; ++h) {
        v += std::sin(h * phase) / h;
      }
      w.samples[start + i] += env * v;
    }
  }

  const double peak = w.samples.abs().maxCoeff();
  if (peak > 0.0) {
    w.samples *= spec.amplitude / peak;
  }
  return w;
}

Waveform gen_noise(NoiseKind kind, Eigen::Index len, std::uint64_t seed,
                   int sample_rate) {
  if (len <= 0) throw std::invalid_argument("noise length must be positive");
  std::mt19937_64 rng(seed);
  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(len);

  switch (kind) {
    case NoiseKind::White: {
      for (Eigen::Index i = 0; i < len; ++i) w.samples[i] = gaussian(rng);
      break;
    }
    case NoiseKind::Pink: {
      // Shape white noise by a 1/sqrt(f) magnitude response in the
      // frequency domain (power falls 3 dB per octave).
      const Eigen::Index n2 = next_pow2(len);
      std::vector<double> white(static_cast<std::size_t>(n2));
      for (auto& v : white) v = gaussian(rng);
      Eigen::FFT<double> fft;
      fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
      std::vector<std::complex<double>> spectrum;
      fft.fwd(spectrum, white);
      spectrum[0] = 0.0;
      for (std::size_t k = 1; k < spectrum.size(); ++k) {
        spectrum[k] /= std::sqrt(static_cast<double>(k));
      }
      std::vector<double> shaped;
      fft.inv(shaped, spectrum, static_cast<int>(n2));
      for (Eigen::Index i = 0; i < len; ++i) {
        w.samples[i] = shaped[static_cast<std::size_t>(i)];
      }
      break;
    }
    case NoiseKind::LowHum: {
      // Mains-style hum: 150 Hz fundamental with decaying harmonics and a
      // weak broadband floor.
      constexpr double kFundamental = 150.0;
      constexpr int kHarmonics = 5;
      Eigen::ArrayXd phases(kHarmonics);
      for (int h = 0; h < kHarmonics; ++h) {
        phases[h] = 2.0 * std::numbers::pi * canonical_double(rng);
      }
      for (Eigen::Index i = 0; i < len; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        double v = 0.0;
        for (int h = 1; h <= kHarmonics; ++h) {
          v += std::sin(2.0 * std::numbers::pi * kFundamental * h * t +
                        phases[h - 1]) /
               h;
        }
        w.samples[i] = v + 0.05 * gaussian(rng);
      }
      break;
    }
  }

  const double rms = std::sqrt(w.samples.square().mean());
  if (rms > 0.0) w.samples /= rms;
  return w;
}

namespace {

std::vector<Eigen::Index> active_frames(const Eigen::MatrixXd& clean_frames) {
  Eigen::VectorXd energy(clean_frames.rows());
  for (Eigen::Index m = 0; m < clean_frames.rows(); ++m) {
    energy[m] = clean_frames.row(m).squaredNorm();
  }
  const double peak = energy.size() > 0 ? energy.maxCoeff() : 0.0;
  std::vector<Eigen::Index> idx;
  for (Eigen::Index m = 0; m < energy.size(); ++m) {
    if (energy[m] > 1e-6 * peak && energy[m] > 0.0) idx.push_back(m);
  }
  return idx;
}

}  // namespace

double active_frame_segsnr(const Waveform& clean, const Waveform& noise,
                           Eigen::Index frame_len) {
  if (clean.samples.size() != noise.samples.size()) {
    throw std::invalid_argument("clean/noise length mismatch");
  }
  const Eigen::MatrixXd cf = signal::frame_signal(clean, frame_len, frame_len);
  const Eigen::MatrixXd nf = signal::frame_signal(noise, frame_len, frame_len);
  const std::vector<Eigen::Index> idx = active_frames(cf);
  if (idx.empty()) {
    throw std::invalid_argument("clean signal has no active frames");
  }

  Waveform s_cat, n_cat;
  s_cat.sample_rate = clean.sample_rate;
  n_cat.sample_rate = clean.sample_rate;
  s_cat.samples.resize(static_cast<Eigen::Index>(idx.size()) * frame_len);
  n_cat.samples.resize(static_cast<Eigen::Index>(idx.size()) * frame_len);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    s_cat.samples.segment(static_cast<Eigen::Index>(i) * frame_len, frame_len) =
        cf.row(idx[i]).transpose().array();
    n_cat.samples.segment(static_cast<Eigen::Index>(i) * frame_len, frame_len) =
        nf.row(idx[i]).transpose().array();
  }
  return metrics::seg_snr(s_cat, n_cat, frame_len);
}

GroundTruthMix mix_at_segsnr(const Waveform& clean, const Waveform& noise,
                             double target_db) {
  const double current = active_frame_segsnr(clean, noise);
  const double gain = std::pow(10.0, (current - target_db) / 20.0);

  GroundTruthMix out;
  out.clean = clean;
  out.noise.sample_rate = noise.sample_rate;
  out.noise.samples = gain * noise.samples;
  out.mix.sample_rate = clean.sample_rate;
  out.mix.samples = out.clean.samples + out.noise.samples;
  out.target_segsnr_db = target_db;
  out.achieved_segsnr_db = active_frame_segsnr(out.clean, out.noise);
  return out;
}

Waveform mixup(const Waveform& a, const Waveform& b, double lambda) {
  if (a.samples.size() != b.samples.size()) {
    throw std::invalid_argument("mixup length mismatch");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("lambda must be in [0, 1]");
  }
  Waveform out;
  out.sample_rate = a.sample_rate;
  out.samples = lambda * a.samples + (1.0 - lambda) * b.samples;
  return out;
}

namespace {

// Windowed-sinc interpolation of x at positions n*step, producing out_len
// samples. The kernel bandwidth shrinks with step > 1 so decimation does
// not alias.
Eigen::ArrayXd sinc_resample(const Eigen::ArrayXd& x, double step,
                             Eigen::Index out_len) {
  constexpr int kHalfWidth = 32;
  const double bandwidth = std::max(1.0, step);
  const double half_span = kHalfWidth * bandwidth;
  Eigen::ArrayXd y(out_len);
  const Eigen::Index n = x.size();

  for (Eigen::Index i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto k0 =
        static_cast<Eigen::Index>(std::ceil(pos - half_span));
    const auto k1 =
        static_cast<Eigen::Index>(std::floor(pos + half_span));
    double acc = 0.0;
    for (Eigen::Index k = std::max<Eigen::Index>(k0, 0);
         k <= std::min(k1, n - 1); ++k) {
      const double t = (pos - static_cast<double>(k)) / bandwidth;
      double kernel;
      if (t == 0.0) {
        kernel = 1.0;
      } else {
        kernel = std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
      }
      const double u = t / kHalfWidth;  // in [-1, 1] over the support
      kernel *= 0.5 * (1.0 + std::cos(std::numbers::pi * u));
      acc += x[k] * kernel / bandwidth;
    }
    y[i] = acc;
  }
  return y;
}

double wrap_phase(double p) {
  return p - 2.0 * std::numbers::pi *
                 std::round(p / (2.0 * std::numbers::pi));
}

// Phase-vocoder resynthesis to an exact output length. Analysis frames are
// read at hop*stretch-scaled positions; synthesis phases accumulate the
// per-bin instantaneous frequency so a unit rate reconstructs exactly.
Waveform vocoder_to_length(const Waveform& w, Eigen::Index out_len) {
  const signal::StftParams params{};
  const int fft_size = params.fft_size;
  const int hop = params.hop;
  const int bins = params.num_bins();
  const Eigen::Index in_len = w.samples.size();
  const double rate = static_cast<double>(in_len) / std::max<Eigen::Index>(out_len, 1);

  // Mirror the centered stft geometry: with half a window of lead-in
  // zeros, unit-rate analysis frames coincide with stft frames and the
  // overlap-add inverse reconstructs exactly.
  const Eigen::Index num_frames = 1 + (out_len + hop - 1) / hop;
  const Eigen::Index lead = fft_size / 2;
  Eigen::ArrayXd padded = Eigen::ArrayXd::Zero(in_len + 2 * fft_size);
  padded.segment(lead, in_len) = w.samples;
  const Eigen::ArrayXd win = signal::hann_window(fft_size);

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> frame(static_cast<std::size_t>(fft_size));
  std::vector<std::complex<double>> spectrum;

  signal::SpectralFrames out_frames;
  out_frames.params = params;
  out_frames.original_length = out_len;
  out_frames.sample_rate = w.sample_rate;
  out_frames.frames.resize(num_frames, bins);

  Eigen::ArrayXd prev_phase(bins);
  Eigen::ArrayXd synth_phase(bins);
  Eigen::Index prev_pos = 0;

  for (Eigen::Index m = 0; m < num_frames; ++m) {
    auto pos = static_cast<Eigen::Index>(
        std::llround(static_cast<double>(m) * hop * rate));
    pos = std::min(pos, padded.size() - fft_size);
    for (int i = 0; i < fft_size; ++i) {
      frame[static_cast<std::size_t>(i)] = padded[pos + i] * win[i];
    }
    fft.fwd(spectrum, frame);

    for (int k = 0; k < bins; ++k) {
      const double mag = std::abs(spectrum[static_cast<std::size_t>(k)]);
      const double phase = std::arg(spectrum[static_cast<std::size_t>(k)]);
      const double bin_freq =
          2.0 * std::numbers::pi * k / fft_size;  // rad per sample
      if (m == 0) {
        synth_phase[k] = phase;
      } else {
        const auto delta = static_cast<double>(pos - prev_pos);
        double inst_freq = bin_freq;
        if (delta > 0.0) {
          const double dev = wrap_phase(phase - prev_phase[k] - delta * bin_freq);
          inst_freq = bin_freq + dev / delta;
        }
        synth_phase[k] += hop * inst_freq;
      }
      prev_phase[k] = phase;
      out_frames.frames(m, k) = std::polar(mag, synth_phase[k]);
    }
    prev_pos = pos;
  }
  return signal::istft(out_frames);
}

}  // namespace

Waveform pitch_shift(const Waveform& w, double semitones) {
  validate(w);
  if (std::abs(semitones) > 12.0) {
    throw std::invalid_argument("pitch shift limited to +/-12 semitones");
  }
  if (semitones == 0.0) {
    const Eigen::ArrayXd y = sinc_resample(w.samples, 1.0, w.samples.size());
    Waveform out;
    out.sample_rate = w.sample_rate;
    out.samples = y;
    return out;
  }
  const double step = std::pow(2.0, semitones / 12.0);
  const auto resampled_len = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(w.samples.size()) / step));

  Waveform resampled;
  resampled.sample_rate = w.sample_rate;
  resampled.samples = sinc_resample(w.samples, step, resampled_len);
  return vocoder_to_length(resampled, w.samples.size());
}

Waveform time_stretch(const Waveform& w, double rate) {
  validate(w);
  if (!(rate >= 0.5 && rate <= 2.0)) {
    throw std::invalid_argument("stretch rate must be in [0.5, 2]");
  }
  const auto out_len = static_cast<Eigen::Index>(
      std::llround(static_cast<double>(w.samples.size()) / rate));
  return vocoder_to_length(w, out_len);
}

}  // namespace biobench::synth

#ifndef BIOBENCH_SYNTH_HPP
#define BIOBENCH_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "biobench/waveform.hpp"

namespace biobench::synth {

using signal::Waveform;

inline constexpr int kCorpusSampleRate = 22050;
inline constexpr double kClipSeconds = 2.0;

enum class Envelope { Hann, Exponential };
enum class NoiseKind { White, Pink, LowHum };

std::string envelope_name(Envelope e);
Envelope envelope_from_name(const std::string& name);
std::string noise_kind_name(NoiseKind k);
NoiseKind noise_kind_from_name(const std::string& name);

/// Parameters of one synthetic call: a train of harmonic linear-frequency
/// sweeps separated by silent gaps, centered in the clip.
struct CallSpec {
  double f_start_hz = 3000.0;
  double f_end_hz = 3000.0;
  int n_harmonics = 1;
  int syllable_count = 3;
  double syllable_len_s = 0.25;
  double gap_len_s = 0.15;
  Envelope envelope = Envelope::Hann;
  double amplitude = 0.3;
  std::uint64_t seed = 0;

  void validate(int sample_rate = kCorpusSampleRate,
                double clip_s = kClipSeconds) const;
};

/// Twelve fixed call presets spanning the analysis bands.
const std::vector<CallSpec>& call_presets();

/// Deterministic synthetic call, kClipSeconds long, silence-padded.
Waveform gen_call(const CallSpec& spec, int sample_rate = kCorpusSampleRate,
                  double clip_s = kClipSeconds);

/// Deterministic noise of the given kind, normalized to unit RMS.
Waveform gen_noise(NoiseKind kind, Eigen::Index len, std::uint64_t seed,
                   int sample_rate = kCorpusSampleRate);

/// Segmental SNR restricted to frames where the clean signal is active
/// (frame energy above 1e-6 of the peak frame), so silence gaps do not
/// dominate the average.
double active_frame_segsnr(const Waveform& clean, const Waveform& noise,
                           Eigen::Index frame_len = 1024);

/// Clean/noise/mix triple with exact ground-truth decomposition.
struct GroundTruthMix {
  Waveform clean;
  Waveform noise;  // already scaled
  Waveform mix;    // clean + noise, sample-exact
  double target_segsnr_db = 0.0;
  double achieved_segsnr_db = 0.0;
};

/// Scales the noise so that the active-frame segmental SNR hits the
/// target (exact scaling law, so achieved lands within 0.1 dB).
GroundTruthMix mix_at_segsnr(const Waveform& clean, const Waveform& noise,
                             double target_db);

/// Convex sample-wise blend lambda*a + (1-lambda)*b.
Waveform mixup(const Waveform& a, const Waveform& b, double lambda);

/// Shifts pitch by the given semitones at constant duration: windowed-sinc
/// resampling followed by a phase-vocoder stretch back to the original
/// length. |semitones| <= 12.
Waveform pitch_shift(const Waveform& w, double semitones);

/// Phase-vocoder time stretch; output length is round(len/rate) and tone
/// frequencies are preserved. rate in [0.5, 2].
Waveform time_stretch(const Waveform& w, double rate);

}  // namespace biobench::synth

#endif  // BIOBENCH_SYNTH_HPP

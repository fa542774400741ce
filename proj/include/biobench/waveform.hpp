#ifndef BIOBENCH_WAVEFORM_HPP
#define BIOBENCH_WAVEFORM_HPP

#include <Eigen/Dense>
#include <cstddef>
#include <filesystem>

namespace biobench::signal {

/// Mono audio buffer. Samples are dimensionless amplitudes, nominally in
/// [-1, 1]; sample_rate is in Hz. The default corpus rate is 22.05 kHz.
struct Waveform {
  Eigen::ArrayXd samples;
  int sample_rate = 22050;

  Eigen::Index size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Throws std::invalid_argument if the waveform is empty, has a
/// non-positive sample rate, or contains NaN/Inf samples.
void validate(const Waveform& w);

/// Reads a PCM WAV file (8/16/24-bit integer or 32-bit float).
/// Multi-channel content is averaged down to mono; integer samples are
/// scaled so that full negative scale maps to -1.0 exactly.
Waveform read_wav(const std::filesystem::path& path);

/// Writes 16-bit PCM mono. Samples outside [-1, 1] are hard-clipped;
/// the number of clipped samples is returned (0 means none).
std::size_t write_wav(const std::filesystem::path& path, const Waveform& w);

/// Splits x into consecutive frames of frame_len samples taken every hop
/// samples; the trailing partial frame is discarded. Returns one frame per
/// row. An input shorter than frame_len yields a 0-row matrix.
Eigen::MatrixXd frame_signal(const Eigen::ArrayXd& x, Eigen::Index frame_len,
                             Eigen::Index hop);

inline Eigen::MatrixXd frame_signal(const Waveform& w, Eigen::Index frame_len,
                                    Eigen::Index hop) {
  return frame_signal(w.samples, frame_len, hop);
}

/// Uniformly rescales so the peak magnitude equals `ceiling` -- but only
/// when the input peak exceeds it. Quieter (and all-zero) inputs pass
/// through unchanged, preserving their natural level.
Waveform peak_normalize(const Waveform& w, double ceiling = 0.99);

}  // namespace biobench::signal

#endif  // BIOBENCH_WAVEFORM_HPP

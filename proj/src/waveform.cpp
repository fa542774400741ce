#include "biobench/waveform.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace biobench::signal {

void validate(const Waveform& w) {
  if (w.samples.size() == 0) {
    throw std::invalid_argument("waveform is empty");
  }
  if (w.sample_rate <= 0) {
    throw std::invalid_argument("sample rate must be positive");
  }
  if (!w.samples.isFinite().all()) {
    throw std::invalid_argument("waveform contains NaN or Inf samples");
  }
}

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

double decode_sample(const std::uint8_t* p, int bits, std::uint16_t format) {
  switch (bits) {
    case 8:
      // 8-bit WAV is unsigned.
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      auto v = static_cast<std::int16_t>(read_u16(p));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;  // sign extend
      return v / 8388608.0;
    }
    case 32: {
      if (format == kFormatFloat) {
        float f;
        std::uint32_t raw = read_u32(p);
        std::memcpy(&f, &raw, sizeof(f));
        return static_cast<double>(f);
      }
      throw std::runtime_error("unsupported encoding: 32-bit integer PCM");
    }
    default:
      throw std::runtime_error("unsupported encoding: " + std::to_string(bits) +
                               "-bit samples");
  }
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open WAV file: " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw std::runtime_error("not a RIFF/WAVE file: " + path.string());
  }

  std::uint16_t format = 0;
  int channels = 0;
  int sample_rate = 0;
  int bits = 0;
  int block_align = 0;
  std::size_t data_offset = 0;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    std::uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
    std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      chunk_size = static_cast<std::uint32_t>(bytes.size() - body);
    }
    if (std::memcmp(id, "fmt ", 4) == 0 && chunk_size >= 16) {
      const std::uint8_t* f = bytes.data() + body;
      format = read_u16(f);
      channels = read_u16(f + 2);
      sample_rate = static_cast<int>(read_u32(f + 4));
      block_align = read_u16(f + 12);
      bits = read_u16(f + 14);
      if (format == kFormatExtensible && chunk_size >= 40) {
        // Actual format is the first word of the SubFormat GUID.
        format = read_u16(f + 24);
      }
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_offset = body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (channels <= 0 || sample_rate <= 0 || bits <= 0) {
    throw std::runtime_error("missing or malformed fmt chunk: " + path.string());
  }
  if (format != kFormatPcm && format != kFormatFloat) {
    throw std::runtime_error("unsupported encoding (format tag " +
                             std::to_string(format) + "): " + path.string());
  }
  const int bytes_per_sample = bits / 8;
  if (block_align <= 0) block_align = bytes_per_sample * channels;
  const std::size_t n_frames = block_align > 0 ? data_size / block_align : 0;
  if (n_frames == 0) {
    throw std::runtime_error("zero-length audio: " + path.string());
  }

  Waveform w;
  w.sample_rate = sample_rate;
  w.samples.resize(static_cast<Eigen::Index>(n_frames));
  for (std::size_t i = 0; i < n_frames; ++i) {
    const std::uint8_t* frame = bytes.data() + data_offset + i * block_align;
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      acc += decode_sample(frame + c * bytes_per_sample, bits, format);
    }
    w.samples[static_cast<Eigen::Index>(i)] = acc / channels;
  }
  return w;
}

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
}

}  // namespace

std::size_t write_wav(const std::filesystem::path& path, const Waveform& w) {
  validate(w);
  const auto n = static_cast<std::uint32_t>(w.samples.size());
  const std::uint32_t data_bytes = n * 2;

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put_u32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);  // mono
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(w.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put_u32(out, data_bytes);

  std::size_t clipped = 0;
  for (Eigen::Index i = 0; i < w.samples.size(); ++i) {
    double s = w.samples[i];
    if (s > 1.0 || s < -1.0) {
      ++clipped;
      s = s > 1.0 ? 1.0 : -1.0;
    }
    auto q = static_cast<long>(std::lrint(s * 32768.0));
    if (q > 32767) q = 32767;
    if (q < -32768) q = -32768;
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    throw std::runtime_error("cannot open for writing: " + path.string());
  }
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) {
    throw std::runtime_error("short write: " + path.string());
  }
  return clipped;
}

Eigen::MatrixXd frame_signal(const Eigen::ArrayXd& x, Eigen::Index frame_len,
                             Eigen::Index hop) {
  if (frame_len <= 0 || hop <= 0) {
    throw std::invalid_argument("frame_len and hop must be positive");
  }
  if (x.size() < frame_len) {
    return Eigen::MatrixXd(0, frame_len);
  }
  const Eigen::Index m = (x.size() - frame_len) / hop + 1;
  Eigen::MatrixXd frames(m, frame_len);
  for (Eigen::Index i = 0; i < m; ++i) {
    frames.row(i) = x.segment(i * hop, frame_len).matrix().transpose();
  }
  return frames;
}

Waveform peak_normalize(const Waveform& w, double ceiling) {
  if (ceiling <= 0.0 || ceiling > 1.0) {
    throw std::invalid_argument("ceiling must be in (0, 1]");
  }
  const double peak = w.samples.abs().maxCoeff();
  if (peak <= ceiling) {
    return w;
  }
  Waveform out = w;
  out.samples *= ceiling / peak;
  return out;
}

}  // namespace biobench::signal

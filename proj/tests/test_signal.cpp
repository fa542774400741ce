#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>
#include <vector>

#include "biobench/bandpass.hpp"
#include "biobench/stft.hpp"
#include "biobench/waveform.hpp"
#include "test_util.hpp"

using namespace biobench;
using testutil::TempDir;
using testutil::tone;
using testutil::white_noise;

namespace {

// Minimal hand-rolled WAV writer so the reader is checked against raw
// bytes rather than against write_wav.
void write_raw_wav(const std::filesystem::path& path, int sample_rate,
                   int channels, int bits, std::uint16_t format,
                   const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> out;
  auto u16 = [&out](std::uint16_t v) {
    out.push_back(v & 0xFF);
    out.push_back(v >> 8);
  };
  auto u32 = [&out](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
  };
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  u32(36 + static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  u32(16);
  u16(format);
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(sample_rate));
  u32(static_cast<std::uint32_t>(sample_rate * channels * bits / 8));
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(static_cast<std::uint16_t>(bits));
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  u32(static_cast<std::uint32_t>(payload.size()));
  out.insert(out.end(), payload.begin(), payload.end());

  std::ofstream f(path, std::ios::binary);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
}

}  // namespace

TEST_CASE("read_wav: 2 s 16-bit mono at 22050 Hz yields 44100 samples") {
  TempDir dir("wav");
  const auto w = tone(440.0, 0.5, 44100);
  signal::write_wav(dir.path() / "t.wav", w);
  const auto r = signal::read_wav(dir.path() / "t.wav");
  CHECK(r.samples.size() == 44100);
  CHECK(r.sample_rate == 22050);
}

TEST_CASE("read_wav: all-zero PCM decodes to silence without error") {
  TempDir dir("wav");
  std::vector<std::uint8_t> payload(2 * 1000, 0);
  write_raw_wav(dir.path() / "z.wav", 22050, 1, 16, 1, payload);
  const auto r = signal::read_wav(dir.path() / "z.wav");
  CHECK(r.samples.size() == 1000);
  CHECK(r.samples.abs().maxCoeff() == 0.0);
}

TEST_CASE("read_wav: int16 full negative scale maps to -1.0 exactly") {
  TempDir dir("wav");
  std::vector<std::uint8_t> payload = {0x00, 0x80, 0xFF, 0x7F};  // -32768, 32767
  write_raw_wav(dir.path() / "fs.wav", 22050, 1, 16, 1, payload);
  const auto r = signal::read_wav(dir.path() / "fs.wav");
  CHECK(r.samples[0] == -1.0);
  CHECK(r.samples[1] == doctest::Approx(32767.0 / 32768.0).epsilon(1e-12));
}

TEST_CASE("read_wav: stereo is averaged to mono") {
  TempDir dir("wav");
  // frame 0: L=+16384, R=0 -> 0.25 ; frame 1: L=-32768, R=-32768 -> -1
  std::vector<std::uint8_t> payload = {0x00, 0x40, 0x00, 0x00,
                                       0x00, 0x80, 0x00, 0x80};
  write_raw_wav(dir.path() / "st.wav", 22050, 2, 16, 1, payload);
  const auto r = signal::read_wav(dir.path() / "st.wav");
  REQUIRE(r.samples.size() == 2);
  CHECK(r.samples[0] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(r.samples[1] == -1.0);
}

TEST_CASE("read_wav: 8-bit, 24-bit and float32 payloads decode") {
  TempDir dir("wav");
  {
    std::vector<std::uint8_t> p8 = {128, 255, 0};  // 0, ~+1, -1
    write_raw_wav(dir.path() / "b8.wav", 8000, 1, 8, 1, p8);
    const auto r = signal::read_wav(dir.path() / "b8.wav");
    CHECK(r.samples[0] == 0.0);
    CHECK(r.samples[1] == doctest::Approx(127.0 / 128.0));
    CHECK(r.samples[2] == -1.0);
  }
  {
    // 24-bit: 0x800000 = -8388608 -> -1.0 ; 0x7FFFFF -> ~+1.0
    std::vector<std::uint8_t> p24 = {0x00, 0x00, 0x80, 0xFF, 0xFF, 0x7F};
    write_raw_wav(dir.path() / "b24.wav", 22050, 1, 24, 1, p24);
    const auto r = signal::read_wav(dir.path() / "b24.wav");
    CHECK(r.samples[0] == -1.0);
    CHECK(r.samples[1] == doctest::Approx(8388607.0 / 8388608.0));
  }
  {
    std::vector<std::uint8_t> pf(8);
    const float a = 0.5f, b = -0.25f;
    std::memcpy(pf.data(), &a, 4);
    std::memcpy(pf.data() + 4, &b, 4);
    write_raw_wav(dir.path() / "f32.wav", 22050, 1, 32, 3, pf);
    const auto r = signal::read_wav(dir.path() / "f32.wav");
    CHECK(r.samples[0] == doctest::Approx(0.5));
    CHECK(r.samples[1] == doctest::Approx(-0.25));
  }
}

TEST_CASE("read_wav: extensible format tag and unknown chunks") {
  TempDir dir("wavext");
  std::vector<std::uint8_t> out;
  auto u16 = [&out](std::uint16_t v) {
    out.push_back(v & 0xFF);
    out.push_back(v >> 8);
  };
  auto u32 = [&out](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
  };
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  u32(4 + 8 + 40 + 8 + 6 + 8 + 4);
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  // LIST chunk before fmt, must be skipped (odd size exercises padding)
  out.insert(out.end(), {'L', 'I', 'S', 'T'});
  u32(5);
  out.insert(out.end(), {'I', 'N', 'F', 'O', 'x', 0});
  // 40-byte extensible fmt, PCM subformat
  out.insert(out.end(), {'f', 'm', 't', ' '});
  u32(40);
  u16(0xFFFE);
  u16(1);
  u32(22050);
  u32(22050 * 2);
  u16(2);
  u16(16);
  u16(22);      // cbSize
  u16(16);      // valid bits
  u32(0x4);     // channel mask
  u16(1);       // subformat: PCM
  for (int i = 0; i < 14; ++i) out.push_back(0);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  u32(4);
  u16(0x4000);  // +0.5
  u16(0x8000);  // -1.0
  std::ofstream f(dir.path() / "ext.wav", std::ios::binary);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  f.close();

  const auto r = signal::read_wav(dir.path() / "ext.wav");
  REQUIRE(r.samples.size() == 2);
  CHECK(r.samples[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.samples[1] == -1.0);
}

TEST_CASE("read_wav: error paths") {
  TempDir dir("wav");
  CHECK_THROWS(signal::read_wav(dir.path() / "missing.wav"));

  // zero-length data chunk
  write_raw_wav(dir.path() / "empty.wav", 22050, 1, 16, 1, {});
  CHECK_THROWS(signal::read_wav(dir.path() / "empty.wav"));

  // unsupported: 32-bit integer PCM
  std::vector<std::uint8_t> p(4, 0);
  write_raw_wav(dir.path() / "i32.wav", 22050, 1, 32, 1, p);
  CHECK_THROWS(signal::read_wav(dir.path() / "i32.wav"));
}

TEST_CASE("write_wav/read_wav round trip stays within one LSB") {
  TempDir dir("wav");
  const auto w = tone(440.0, 0.9, 22050);
  const std::size_t clipped = signal::write_wav(dir.path() / "rt.wav", w);
  CHECK(clipped == 0);
  const auto r = signal::read_wav(dir.path() / "rt.wav");
  REQUIRE(r.samples.size() == w.samples.size());
  CHECK((r.samples - w.samples).abs().maxCoeff() <= std::pow(2.0, -15));
}

TEST_CASE("write_wav: out-of-range samples clip to full scale and count") {
  TempDir dir("wav");
  signal::Waveform w;
  w.samples.resize(3);
  w.samples << 0.5, 1.5, -0.25;
  const std::size_t clipped = signal::write_wav(dir.path() / "c.wav", w);
  CHECK(clipped == 1);
  const auto r = signal::read_wav(dir.path() / "c.wav");
  CHECK(r.samples[1] == doctest::Approx(32767.0 / 32768.0).epsilon(1e-12));
}

TEST_CASE("write_wav: empty waveform is rejected, nothing written") {
  TempDir dir("wav");
  signal::Waveform w;
  CHECK_THROWS(signal::write_wav(dir.path() / "e.wav", w));
  CHECK(!std::filesystem::exists(dir.path() / "e.wav"));
}

TEST_CASE("frame_signal frame counts") {
  Eigen::ArrayXd x = Eigen::ArrayXd::Random(44100);
  CHECK(signal::frame_signal(x, 1024, 1024).rows() == 43);
  CHECK(signal::frame_signal(Eigen::ArrayXd::Random(1024), 1024, 256).rows() == 1);
  CHECK(signal::frame_signal(Eigen::ArrayXd::Random(1000), 1024, 256).rows() == 0);
}

TEST_CASE("frame_signal count matches direct enumeration (property)") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto len = static_cast<Eigen::Index>(rng() % 5000 + 1);
    const auto frame_len = static_cast<Eigen::Index>(rng() % 512 + 1);
    const auto hop = static_cast<Eigen::Index>(rng() % 256 + 1);
    Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(len, 0.0, 1.0);
    const auto frames = signal::frame_signal(x, frame_len, hop);

    Eigen::Index expected = 0;
    for (Eigen::Index start = 0; start + frame_len <= len; start += hop) {
      ++expected;
    }
    REQUIRE(frames.rows() == expected);
    if (expected > 0) {
      // spot-check the last frame contents
      const Eigen::Index start = (expected - 1) * hop;
      CHECK(frames(expected - 1, 0) == x[start]);
      CHECK(frames(expected - 1, frame_len - 1) == x[start + frame_len - 1]);
    }
  }
}

TEST_CASE("stft: bin-aligned tone peaks at its bin in every frame") {
  const double freq = 100.0 * 22050.0 / 1024.0;  // exactly bin 100
  const auto w = tone(freq, 1.0, 44100);
  const auto s = signal::stft(w);
  for (Eigen::Index m = 0; m + 1 < s.frames.rows(); ++m) {  // last frame padded
    Eigen::Index argmax = 0;
    s.frames.row(m).cwiseAbs().maxCoeff(&argmax);
    CHECK(argmax == 100);
  }
}

TEST_CASE("stft: zeros give zero frames; DC concentrates in bin 0") {
  signal::Waveform z;
  z.samples = Eigen::ArrayXd::Zero(4096);
  const auto s = signal::stft(z);
  CHECK(s.frames.cwiseAbs().maxCoeff() == 0.0);

  signal::Waveform dc;
  dc.samples = Eigen::ArrayXd::Constant(4096, 0.7);
  const auto d = signal::stft(dc);
  // Interior frames see pure DC (boundary frames contain the centering
  // padding step). Hann smears DC into bins 0 and +/-1; bin 0 holds
  // (N/2)^2 of the (N/2)^2 + (N/4)^2 half-spectrum energy, exactly 80%.
  REQUIRE(d.frames.rows() >= 6);
  for (Eigen::Index m = 2; m + 2 < d.frames.rows(); ++m) {
    Eigen::Index argmax = 0;
    d.frames.row(m).cwiseAbs().maxCoeff(&argmax);
    CHECK(argmax == 0);
    const double total = d.frames.row(m).cwiseAbs2().sum();
    CHECK(std::norm(d.frames(m, 0)) / total ==
          doctest::Approx(0.8).epsilon(1e-6));
  }
  CHECK_THROWS(signal::stft(tone(440.0, 1.0, 512)));  // shorter than fft_size
}

TEST_CASE("istft(stft(x)) reconstructs interior samples to -60 dB") {
  const auto w = white_noise(8192, 99);
  const auto back = signal::istft(signal::stft(w));
  REQUIRE(back.samples.size() == w.samples.size());
  const Eigen::Index lo = 1024, hi = w.samples.size() - 1024;
  const double err = (back.samples.segment(lo, hi - lo) -
                      w.samples.segment(lo, hi - lo))
                         .matrix()
                         .norm();
  const double ref = w.samples.segment(lo, hi - lo).matrix().norm();
  CHECK(err / ref <= 1e-3);
}

TEST_CASE("istft: zero frames give silence; doubling frames doubles output") {
  signal::SpectralFrames s;
  s.params = signal::StftParams{};
  s.frames = Eigen::MatrixXcd::Zero(1, s.params.num_bins());
  s.original_length = 1024;
  const auto single = signal::istft(s);
  CHECK(single.samples.abs().maxCoeff() == 0.0);

  s.frames = Eigen::MatrixXcd::Zero(5, s.params.num_bins());
  const auto out = signal::istft(s);
  CHECK(out.samples.size() == 1024);
  CHECK(out.samples.abs().maxCoeff() == 0.0);

  const auto w = white_noise(8192, 5);
  auto spec = signal::stft(w);
  auto doubled = spec;
  doubled.frames *= 2.0;
  const auto y1 = signal::istft(spec);
  const auto y2 = signal::istft(doubled);
  CHECK((y2.samples - 2.0 * y1.samples).abs().maxCoeff() < 1e-9);

  signal::SpectralFrames bad = spec;
  bad.frames = Eigen::MatrixXcd::Zero(2, 100);
  CHECK_THROWS(signal::istft(bad));
}

TEST_CASE("StftParams validation") {
  signal::StftParams ok;
  CHECK_NOTHROW(ok.validate());
  signal::StftParams bad_fft;
  bad_fft.fft_size = 1000;
  CHECK_THROWS(bad_fft.validate());
  signal::StftParams bad_hop;
  bad_hop.hop = 0;
  CHECK_THROWS(bad_hop.validate());
  signal::StftParams no_cola;  // Hann squared is not COLA at hop == fft_size
  no_cola.hop = 1024;
  CHECK_THROWS(no_cola.validate());
}

TEST_CASE("bandpass: passband center within 1 dB, stopband >= 40 dB down") {
  const signal::BandSpec band{1500.0, 3000.0};
  const auto pass = signal::bandpass_filter(tone(2250.0, 0.5, 44100), band);
  const auto stop = signal::bandpass_filter(tone(300.0, 0.5, 44100), band);
  const double in_rms = testutil::rms(tone(2250.0, 0.5, 44100).samples);
  // measure away from the clip edges
  const double pass_rms =
      testutil::rms(pass.samples.segment(2000, 40000).eval());
  const double stop_rms =
      testutil::rms(stop.samples.segment(2000, 40000).eval());
  CHECK(std::abs(testutil::db_ratio(pass_rms, in_rms)) <= 1.0);
  CHECK(testutil::db_ratio(stop_rms, in_rms) <= -40.0);

  signal::Waveform z;
  z.samples = Eigen::ArrayXd::Zero(4096);
  CHECK(signal::bandpass_filter(z, band).samples.abs().maxCoeff() == 0.0);
}

TEST_CASE("bandpass: band exceeding Nyquist is rejected") {
  CHECK_THROWS(signal::bandpass_filter(tone(440.0, 0.5, 4096),
                                       signal::BandSpec{5000.0, 12000.0}));
  CHECK_THROWS(signal::BandSpec{0.0, 500.0}.validate(22050));
  CHECK_THROWS(signal::BandSpec{900.0, 700.0}.validate(22050));
}

TEST_CASE("bandpass linearity: filter(a x + b y) == a f(x) + b f(y)") {
  const auto x = white_noise(9000, 11);
  const auto y = white_noise(9000, 12);
  const signal::BandSpec band{2000.0, 8000.0};
  const double a = 0.7, b = -1.3;

  signal::Waveform mix;
  mix.samples = a * x.samples + b * y.samples;
  const auto lhs = signal::bandpass_filter(mix, band);
  const auto fx = signal::bandpass_filter(x, band);
  const auto fy = signal::bandpass_filter(y, band);
  CHECK((lhs.samples - (a * fx.samples + b * fy.samples)).abs().maxCoeff() <
        1e-9);
}

TEST_CASE("bandpass: measured tone response matches the designed FIR") {
  // Sweep band edges and one octave outside for every default-style band;
  // the measured attenuation must match the analytic response closely.
  const int fs = 22050;
  for (const auto& band :
       {signal::BandSpec{1500.0, 3000.0}, signal::BandSpec{4000.0, 8000.0}}) {
    const auto taps = signal::design_bandpass_fir(band, fs);
    for (double freq : {band.f_low, band.f_high, band.f_low / 2.0,
                        (band.f_low + band.f_high) / 2.0}) {
      const auto in = tone(freq, 0.5, 44100, fs);
      const auto out = signal::bandpass_filter(in, band);
      const double measured = testutil::db_ratio(
          testutil::rms(out.samples.segment(4000, 36000).eval()),
          testutil::rms(in.samples.segment(4000, 36000).eval()));
      const double designed = signal::fir_response_db(taps, freq, fs);
      if (designed > -55.0) {  // deep stopband is dominated by leakage
        CHECK(std::abs(measured - designed) <= 0.5);
      } else {
        CHECK(measured <= -55.0 + 0.5);
      }
    }
  }
}

TEST_CASE("peak_normalize") {
  signal::Waveform loud;
  loud.samples.resize(4);
  loud.samples << 0.3, -1.8, 0.9, 0.0;
  const auto out = signal::peak_normalize(loud, 0.99);
  CHECK(out.samples.abs().maxCoeff() == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(out.samples[0] / out.samples[2] ==
        doctest::Approx(loud.samples[0] / loud.samples[2]).epsilon(1e-12));

  signal::Waveform quiet;
  quiet.samples.resize(2);
  quiet.samples << 0.4, -0.2;
  const auto same = signal::peak_normalize(quiet, 0.99);
  CHECK((same.samples == quiet.samples).all());

  signal::Waveform zero;
  zero.samples = Eigen::ArrayXd::Zero(8);
  CHECK(signal::peak_normalize(zero, 0.99).samples.abs().maxCoeff() == 0.0);
  CHECK_THROWS(signal::peak_normalize(quiet, 0.0));
}

TEST_CASE("purity: identical inputs give bit-identical outputs") {
  const auto w = white_noise(6000, 123);
  const auto a = signal::bandpass_filter(w, {2000.0, 8000.0});
  const auto b = signal::bandpass_filter(w, {2000.0, 8000.0});
  CHECK((a.samples == b.samples).all());

  const auto s1 = signal::stft(w);
  const auto s2 = signal::stft(w);
  CHECK((s1.frames.array() == s2.frames.array()).all());
}

// Acceptance suite: one pass/fail line per criterion, non-zero exit on any
// failure. Criterion 1 runs the full 50-clip benchmark and is also the
// wall-clock budget check.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "biobench/bandpass.hpp"
#include "biobench/enhance.hpp"
#include "biobench/metrics.hpp"
#include "biobench/mmse.hpp"
#include "biobench/pipeline.hpp"
#include "biobench/stft.hpp"
#include "biobench/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace biobench;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void print_result(int criterion, bool ok, const std::string& summary) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion,
              summary.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string report_without_runtimes(const fs::path& path) {
  nlohmann::json j;
  std::ifstream in(path);
  in >> j;
  for (auto& row : j["per_file"]) row["runtime_ms"] = 0.0;
  for (auto& agg : j["aggregate"]) agg["runtime_ms_mean"] = 0.0;
  return j.dump();
}

struct Corpus {
  fs::path mixes;
  fs::path corpus;
};

Corpus build_corpus(const fs::path& root, int count) {
  pipeline::SynthOptions opts;
  opts.count = count;
  opts.out_dir = root / "corpus";
  opts.master_seed = 424242;
  opts.snr_list_db = {-5.0};
  pipeline::run_synth(opts);

  Corpus corpus;
  corpus.corpus = opts.out_dir;
  corpus.mixes = root / "mixes";
  fs::create_directories(corpus.mixes);
  for (const auto& e : fs::directory_iterator(opts.out_dir)) {
    if (e.path().filename().string().ends_with("_mix.wav")) {
      fs::copy_file(e.path(), corpus.mixes / e.path().filename());
    }
  }
  return corpus;
}

pipeline::Report enhance_corpus(const Corpus& corpus, const fs::path& out,
                                int jobs) {
  pipeline::RunConfig cfg;
  cfg.input_dir = corpus.mixes;
  cfg.output_dir = out;
  cfg.method = pipeline::MethodSelect::All;
  cfg.jobs = jobs;
  return pipeline::run_enhance(cfg).report;
}

double uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// ---------------------------------------------------------------------------

void criterion_1_and_9(const fs::path& root) {
  const auto t0 = std::chrono::steady_clock::now();
  const Corpus corpus = build_corpus(root / "c1", 50);
  const pipeline::Report report = enhance_corpus(corpus, root / "c1" / "run1", 1);
  pipeline::run_report({root / "c1" / "run1" / "report.json"},
                       root / "c1" / "comparison.md",
                       root / "c1" / "comparison.csv");
  const double elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::map<std::string, const pipeline::MethodAggregate*> agg;
  for (const auto& a : report.aggregate) agg[a.method] = &a;
  bool ok = agg.count("mabe") && agg.count("specsub") &&
            agg.count("mmse_stsa") && agg.count("mmse_lsa");
  double mabe_snr = 0.0, mabe_isd = 0.0;
  if (ok) {
    mabe_snr = agg["mabe"]->snr_improvement_db_mean;
    mabe_isd = agg["mabe"]->isd_mean;
    ok = ok && mabe_snr >= 5.0;
    for (const char* baseline : {"specsub", "mmse_stsa", "mmse_lsa"}) {
      ok = ok && mabe_snr > agg[baseline]->snr_improvement_db_mean;
      ok = ok && mabe_isd < agg[baseline]->isd_mean;
    }
  }
  ok = ok && elapsed_s <= 120.0;

  std::ostringstream msg;
  msg << "oracle-corpus ordering: MABE " << std::fixed << std::setprecision(2)
      << (mabe_snr >= 0 ? "+" : "") << mabe_snr << " dB / ISD " << mabe_isd;
  if (agg.count("specsub")) {
    msg << " vs specsub " << agg["specsub"]->snr_improvement_db_mean << " dB / "
        << agg["specsub"]->isd_mean << ", mmse_stsa "
        << agg["mmse_stsa"]->snr_improvement_db_mean << " dB / "
        << agg["mmse_stsa"]->isd_mean << ", mmse_lsa "
        << agg["mmse_lsa"]->snr_improvement_db_mean << " dB / "
        << agg["mmse_lsa"]->isd_mean;
  }
  msg << "; run " << std::setprecision(1) << elapsed_s << " s (limit 120)";
  print_result(1, ok, msg.str());

  // criterion 9: determinism and parallel equivalence on the same corpus
  const pipeline::Report r2 = enhance_corpus(corpus, root / "c1" / "run2", 1);
  const pipeline::Report r8 = enhance_corpus(corpus, root / "c1" / "run8", 8);
  (void)r2;
  (void)r8;

  bool det = true;
  for (const auto& e : fs::directory_iterator(root / "c1" / "run1")) {
    if (e.path().extension() != ".wav") continue;
    const auto name = e.path().filename();
    det = det && slurp(e.path()) == slurp(root / "c1" / "run2" / name);
    det = det && slurp(e.path()) == slurp(root / "c1" / "run8" / name);
  }
  const std::string rep1 = report_without_runtimes(root / "c1" / "run1" / "report.json");
  det = det && rep1 == report_without_runtimes(root / "c1" / "run2" / "report.json");
  det = det && rep1 == report_without_runtimes(root / "c1" / "run8" / "report.json");

  // synth reproducibility under the same master seed
  const Corpus again = build_corpus(root / "c9", 50);
  det = det && slurp(corpus.corpus / "manifest.csv") ==
                   slurp(again.corpus / "manifest.csv");
  det = det && slurp(corpus.corpus / "clip_007_mix.wav") ==
                   slurp(again.corpus / "clip_007_mix.wav");
  print_result(9, det,
         "determinism: reruns byte-identical (runtime fields excluded), "
         "jobs=8 equals jobs=1");
}

void criterion_2() {
  std::mt19937_64 rng(2026);
  bool ok = true;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = testutil::white_noise(6144, rng(), 0.2 + uniform(rng));
    const auto n = testutil::white_noise(6144, rng(), 0.05 + uniform(rng));
    const double g = 0.1 + 10.0 * uniform(rng);
    signal::Waveform scaled;
    scaled.samples = g * n.samples;
    const double lhs = metrics::seg_snr(s, scaled);
    const double rhs = metrics::seg_snr(s, n) - 20.0 * std::log10(g);
    worst = std::max(worst, std::abs(lhs - rhs));
    ok = ok && std::abs(lhs - rhs) <= 1e-6;
  }
  std::ostringstream msg;
  msg << "SegSNR noise-scaling law over 100 triples, worst |error| = "
      << std::scientific << std::setprecision(2) << worst << " dB (tol 1e-6)";
  print_result(2, ok, msg.str());
}

void criterion_3() {
  bool ok = true;
  const auto x = testutil::white_noise(22050, 30);
  ok = ok && metrics::isd(x, x) <= 1e-9;

  std::vector<metrics::FeatureVector> set;
  std::mt19937_64 rng(31);
  for (int i = 0; i < 64; ++i) {
    Eigen::Matrix<double, 10, 1> v;
    for (int d = 0; d < 10; ++d) v[d] = uniform(rng);
    set.push_back(metrics::FeatureVector::from_vector(v));
  }
  ok = ok && metrics::jsd_features(set, set) <= 1e-12;
  ok = ok && metrics::ndb(set, set, 8) == 0;

  Eigen::MatrixXd emb(30, 5);
  for (Eigen::Index i = 0; i < emb.size(); ++i) emb(i) = uniform(rng);
  const auto fit = metrics::fit_gaussian(emb);
  ok = ok && metrics::frechet_distance(fit, fit) <= 1e-6;

  double worst = 0.0;
  for (double c : {0.5, 2.0, 10.0}) {
    signal::Waveform scaled;
    scaled.sample_rate = x.sample_rate;
    scaled.samples = x.samples / std::sqrt(c);
    const double expected = c - std::log(c) - 1.0;
    const double got = metrics::isd(x, scaled);
    worst = std::max(worst, std::abs(got - expected));
    ok = ok && std::abs(got - expected) <= 1e-6;
  }
  std::ostringstream msg;
  msg << "metric identities (isd/jsd/ndb/frechet) and constant-ratio ISD, "
         "worst ISD error "
      << std::scientific << std::setprecision(2) << worst;
  print_result(3, ok, msg.str());
}

void criterion_4() {
  bool ok = true;
  metrics::GaussianFit u, v;
  u.mean = Eigen::VectorXd::Zero(5);
  v.mean.resize(5);
  v.mean << 0.5, -1.5, 2.0, 0.0, 1.0;
  u.covariance = Eigen::MatrixXd::Identity(5, 5);
  v.covariance = Eigen::MatrixXd::Identity(5, 5);
  ok = ok && std::abs(metrics::frechet_distance(u, v) - v.mean.squaredNorm()) <=
                 1e-9;

  std::mt19937_64 rng(47);
  auto gauss = [&rng]() {
    double u1 = uniform(rng);
    while (u1 <= 0.0) u1 = uniform(rng);
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * uniform(rng));
  };
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    metrics::GaussianFit a, b;
    a.mean.resize(5);
    b.mean.resize(5);
    Eigen::MatrixXd ra(5, 5), rb(5, 5);
    for (int i = 0; i < 5; ++i) {
      a.mean[i] = gauss();
      b.mean[i] = gauss();
      for (int j = 0; j < 5; ++j) {
        ra(i, j) = gauss();
        rb(i, j) = gauss();
      }
    }
    a.covariance = ra * ra.transpose() + 0.1 * Eigen::MatrixXd::Identity(5, 5);
    b.covariance = rb * rb.transpose() + 0.1 * Eigen::MatrixXd::Identity(5, 5);
    const double mine = metrics::frechet_distance(a, b);
    const double other = oracles::frechet_via_product_eigs(a, b);
    worst = std::max(worst, std::abs(mine - other));
    ok = ok && std::abs(mine - other) <= 1e-6;
  }
  std::ostringstream msg;
  msg << "Frechet closed form and dual-factorization oracle, worst |delta| = "
      << std::scientific << std::setprecision(2) << worst;
  print_result(4, ok, msg.str());
}

void criterion_5() {
  bool ok = true;

  const auto w = testutil::white_noise(8192, 53);
  const auto back = signal::istft(signal::stft(w));
  const Eigen::Index lo = 1024, hi = w.samples.size() - 1024;
  const double rel = (back.samples.segment(lo, hi - lo) -
                      w.samples.segment(lo, hi - lo))
                         .matrix()
                         .norm() /
                     w.samples.segment(lo, hi - lo).matrix().norm();
  ok = ok && rel <= 1e-3;

  double worst_center_loss = 0.0;
  double worst_octave_att = -1e9;
  for (const auto& band : enhance::default_bands()) {
    const double center = 0.5 * (band.f_low + band.f_high);
    const auto in = testutil::tone(center, 0.5, 44100);
    const auto out = signal::bandpass_filter(in, band);
    const double loss = std::abs(testutil::db_ratio(
        testutil::rms(out.samples.segment(4000, 36000).eval()),
        testutil::rms(in.samples.segment(4000, 36000).eval())));
    worst_center_loss = std::max(worst_center_loss, loss);
    ok = ok && loss <= 1.0;

    std::vector<double> outside = {band.f_low / 2.0};
    if (band.f_high * 2.0 < 22050.0 / 2.0) outside.push_back(band.f_high * 2.0);
    for (double freq : outside) {
      const auto probe = testutil::tone(freq, 0.5, 44100);
      const auto fo = signal::bandpass_filter(probe, band);
      const double att = testutil::db_ratio(
          testutil::rms(fo.samples.segment(4000, 36000).eval()),
          testutil::rms(probe.samples.segment(4000, 36000).eval()));
      worst_octave_att = std::max(worst_octave_att, att);
      ok = ok && att <= -40.0;
    }
  }

  const auto x = testutil::white_noise(22050, 54, 0.3);
  std::vector<signal::Waveform> bands;
  std::vector<double> weights;
  for (const auto& band : enhance::default_bands()) {
    bands.push_back(signal::bandpass_filter(x, band));
    weights.push_back(enhance::adaptive_weight(bands.back(), x, band));
  }
  auto [s_est, residual] = enhance::reconstruct_weighted(x, bands, weights);
  const double ident =
      (s_est.samples + residual.samples - x.samples).abs().maxCoeff();
  ok = ok && ident <= 1e-12;

  std::ostringstream msg;
  msg << "DSP contracts: round trip " << std::scientific << std::setprecision(2)
      << rel << ", worst center loss " << std::fixed << std::setprecision(2)
      << worst_center_loss << " dB, worst octave-out " << worst_octave_att
      << " dB, decomposition residue " << std::scientific << ident;
  print_result(5, ok, msg.str());
}

void criterion_6() {
  const auto x = testutil::tone(3000.0, 0.5, 44100);
  const auto f = metrics::extract_features(x);
  bool ok = std::abs(f.spectral_centroid_hz - 3000.0) <= 0.02 * 3000.0;
  const double zcr_expected = 2.0 * 3000.0 / 22050.0;
  ok = ok && std::abs(f.zcr - zcr_expected) <= 0.02 * zcr_expected;

  signal::Waveform scaled;
  scaled.sample_rate = x.sample_rate;
  scaled.samples = 2.5 * x.samples;
  const auto g = metrics::extract_features(scaled);
  ok = ok && std::abs(g.zcr - f.zcr) <= 1e-9;
  ok = ok && std::abs(g.dom_freq_pos - f.dom_freq_pos) <= 1e-9;
  ok = ok && std::abs(g.spectral_centroid_hz - f.spectral_centroid_hz) <=
                 1e-9 * f.spectral_centroid_hz;

  std::ostringstream msg;
  msg << "feature oracle: centroid " << std::fixed << std::setprecision(1)
      << f.spectral_centroid_hz << " Hz (target 3000 +/- 2%), zcr "
      << std::setprecision(4) << f.zcr << " (target " << zcr_expected
      << " +/- 2%), scaling invariances";
  print_result(6, ok, msg.str());
}

void criterion_7() {
  bool ok = true;
  double worst = 0.0;
  for (double xi_db : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
    for (double gamma_db : {-10.0, -5.0, 0.0, 5.0, 10.0}) {
      const double xi = std::pow(10.0, xi_db / 10.0);
      const double gamma = std::pow(10.0, gamma_db / 10.0);
      const double d_stsa = std::abs(enhance::stsa_gain(xi, gamma) -
                                     oracles::stsa_gain_quadrature(xi, gamma));
      const double d_lsa = std::abs(enhance::lsa_gain(xi, gamma) -
                                    oracles::lsa_gain_quadrature(xi, gamma));
      worst = std::max({worst, d_stsa, d_lsa});
      ok = ok && d_stsa <= 1e-4 && d_lsa <= 1e-4;
    }
  }
  std::ostringstream msg;
  msg << "MMSE STSA/LSA gains vs quadrature oracles at 25 grid points, "
         "worst |delta| = "
      << std::scientific << std::setprecision(2) << worst << " (tol 1e-4)";
  print_result(7, ok, msg.str());
}

void criterion_8() {
  bool ok = true;
  double worst = 0.0;
  const auto& presets = synth::call_presets();
  int idx = 0;
  for (double target : {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0}) {
    auto spec = presets[static_cast<std::size_t>(idx) % presets.size()];
    spec.seed = 900 + static_cast<std::uint64_t>(idx);
    const auto clean = synth::gen_call(spec);
    const auto noise = synth::gen_noise(
        idx % 2 == 0 ? synth::NoiseKind::White : synth::NoiseKind::Pink, 44100,
        1000 + static_cast<std::uint64_t>(idx));
    const auto gtm = synth::mix_at_segsnr(clean, noise, target);
    const double err = std::abs(gtm.achieved_segsnr_db - target);
    const double remeasured =
        std::abs(synth::active_frame_segsnr(gtm.clean, gtm.noise) - target);
    worst = std::max({worst, err, remeasured});
    ok = ok && err <= 0.1 && remeasured <= 0.1;
    ++idx;
  }
  std::ostringstream msg;
  msg << "mix_at_segsnr hits every target, worst |achieved - target| = "
      << std::scientific << std::setprecision(2) << worst << " dB (tol 0.1)";
  print_result(8, ok, msg.str());
}

void criterion_10() {
  bool ok = true;
  const auto up_in = testutil::tone(2000.0, 0.5, 44100);
  const auto up = synth::pitch_shift(up_in, 12.0);
  const auto down_in = testutil::tone(3000.0, 0.5, 44100);
  const auto down = synth::pitch_shift(down_in, -12.0);

  auto dominant = [](const signal::Waveform& w) {
    const auto frames = signal::stft(w);
    const Eigen::ArrayXd mag =
        frames.frames.array().abs().colwise().mean().transpose();
    Eigen::Index k = 0;
    mag.maxCoeff(&k);
    return signal::bin_frequency_hz(static_cast<int>(k), 1024, w.sample_rate);
  };

  ok = ok && up.samples.size() == 44100;
  ok = ok && down.samples.size() == 44100;
  const double f_up = dominant(up);
  const double f_down = dominant(down);
  ok = ok && std::abs(f_up - 4000.0) <= 0.03 * 4000.0;
  ok = ok && std::abs(f_down - 1500.0) <= 0.03 * 1500.0;

  const auto st_in = testutil::tone(3000.0, 0.5, 44100);
  const auto fast = synth::time_stretch(st_in, 2.0);
  const auto slow = synth::time_stretch(st_in, 0.5);
  ok = ok && fast.samples.size() == 22050;
  ok = ok && slow.samples.size() == 88200;
  const double f_fast = dominant(fast);
  const double f_slow = dominant(slow);
  ok = ok && std::abs(f_fast - 3000.0) <= 0.03 * 3000.0;
  ok = ok && std::abs(f_slow - 3000.0) <= 0.03 * 3000.0;

  std::ostringstream msg;
  msg << "augmentation contracts: +12 st 2000->" << std::fixed
      << std::setprecision(0) << f_up << " Hz, -12 st 3000->" << f_down
      << " Hz, stretch keeps 3000->" << f_fast << "/" << f_slow
      << " Hz at contracted lengths";
  print_result(10, ok, msg.str());
}

}  // namespace

int main() {
  testutil::TempDir root("acceptance");

  criterion_1_and_9(root.path());
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_10();

  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) FAILED\n", g_failures);
  return 1;
}

#include "biobench/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "biobench/csv.hpp"

namespace biobench::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

MethodSelect method_select_from_name(const std::string& name) {
  if (name == "mabe") return MethodSelect::Mabe;
  if (name == "specsub") return MethodSelect::SpecSub;
  if (name == "mmse_stsa") return MethodSelect::MmseStsa;
  if (name == "mmse_lsa") return MethodSelect::MmseLsa;
  if (name == "all") return MethodSelect::All;
  throw UsageError("unknown method: " + name);
}

std::vector<enhance::Method> selected_methods(MethodSelect sel) {
  using enhance::Method;
  switch (sel) {
    case MethodSelect::Mabe: return {Method::Mabe};
    case MethodSelect::SpecSub: return {Method::SpecSub};
    case MethodSelect::MmseStsa: return {Method::MmseStsa};
    case MethodSelect::MmseLsa: return {Method::MmseLsa};
    case MethodSelect::All:
      return {Method::SpecSub, Method::MmseStsa, Method::MmseLsa, Method::Mabe};
  }
  return {};
}

void RunConfig::validate() const {
  if (input_dir.empty() || output_dir.empty()) {
    throw UsageError("input and output directories are required");
  }
  if (fs::weakly_canonical(input_dir) == fs::weakly_canonical(output_dir)) {
    throw UsageError("input and output directories must differ");
  }
  if (jobs < 1) throw UsageError("jobs must be >= 1");
  mabe.validate();
}

std::vector<fs::path> list_wavs(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw IoError("not a directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  return files;
}

std::string corpus_fingerprint(const std::vector<fs::path>& files) {
  std::vector<std::string> names;
  names.reserve(files.size());
  for (const auto& f : files) names.push_back(f.filename().string());
  std::sort(names.begin(), names.end());

  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&hash](unsigned char c) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  };
  for (const auto& n : names) {
    for (unsigned char c : n) mix(c);
    mix('\n');
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << hash;
  return out.str();
}

json report_to_json(const Report& report) {
  json j;
  j["corpus_fingerprint"] = report.corpus_fingerprint;
  j["per_file"] = json::array();
  for (const auto& row : report.per_file) {
    j["per_file"].push_back({{"file_id", row.file_id},
                             {"method", row.method},
                             {"snr_improvement_db", row.snr_improvement_db},
                             {"isd", row.isd},
                             {"runtime_ms", row.runtime_ms}});
  }
  j["aggregate"] = json::array();
  for (const auto& agg : report.aggregate) {
    j["aggregate"].push_back(
        {{"method", agg.method},
         {"files", agg.files},
         {"snr_improvement_db_mean", agg.snr_improvement_db_mean},
         {"snr_improvement_db_std", agg.snr_improvement_db_std},
         {"isd_mean", agg.isd_mean},
         {"isd_std", agg.isd_std},
         {"runtime_ms_mean", agg.runtime_ms_mean}});
  }
  return j;
}

Report report_from_json(const json& j) {
  Report report;
  report.corpus_fingerprint = j.at("corpus_fingerprint").get<std::string>();
  for (const auto& r : j.at("per_file")) {
    PerFileRow row;
    row.file_id = r.at("file_id").get<std::string>();
    row.method = r.at("method").get<std::string>();
    row.snr_improvement_db = r.at("snr_improvement_db").get<double>();
    row.isd = r.at("isd").get<double>();
    row.runtime_ms = r.at("runtime_ms").get<double>();
    report.per_file.push_back(std::move(row));
  }
  for (const auto& a : j.at("aggregate")) {
    MethodAggregate agg;
    agg.method = a.at("method").get<std::string>();
    agg.files = a.at("files").get<int>();
    agg.snr_improvement_db_mean = a.at("snr_improvement_db_mean").get<double>();
    agg.snr_improvement_db_std = a.at("snr_improvement_db_std").get<double>();
    agg.isd_mean = a.at("isd_mean").get<double>();
    agg.isd_std = a.at("isd_std").get<double>();
    agg.runtime_ms_mean = a.at("runtime_ms_mean").get<double>();
    report.aggregate.push_back(std::move(agg));
  }
  return report;
}

void write_report(const fs::path& path, const Report& report) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write report: " + path.string());
  out << report_to_json(report).dump(2) << "\n";
}

Report read_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read report: " + path.string());
  json j;
  in >> j;
  return report_from_json(j);
}

namespace {

struct RowStats {
  double mean = 0.0;
  double stddev = 0.0;
};

RowStats mean_std(const std::vector<double>& v) {
  RowStats s;
  if (v.empty()) return s;
  double acc = 0.0;
  for (double x : v) acc += x;
  s.mean = acc / static_cast<double>(v.size());
  if (v.size() > 1) {
    double sq = 0.0;
    for (double x : v) sq += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(sq / static_cast<double>(v.size() - 1));
  }
  return s;
}

std::vector<MethodAggregate> aggregate_rows(
    const std::vector<PerFileRow>& rows,
    const std::vector<enhance::Method>& order) {
  std::vector<MethodAggregate> out;
  for (enhance::Method m : order) {
    const std::string id = enhance::method_id(m);
    std::vector<double> snr, isd_v, rt;
    for (const auto& row : rows) {
      if (row.method != id) continue;
      snr.push_back(row.snr_improvement_db);
      isd_v.push_back(row.isd);
      rt.push_back(row.runtime_ms);
    }
    if (snr.empty()) continue;
    MethodAggregate agg;
    agg.method = id;
    agg.files = static_cast<int>(snr.size());
    const RowStats s1 = mean_std(snr);
    const RowStats s2 = mean_std(isd_v);
    const RowStats s3 = mean_std(rt);
    agg.snr_improvement_db_mean = s1.mean;
    agg.snr_improvement_db_std = s1.stddev;
    agg.isd_mean = s2.mean;
    agg.isd_std = s2.stddev;
    agg.runtime_ms_mean = s3.mean;
    out.push_back(std::move(agg));
  }
  return out;
}

json diagnostics_json(const std::string& file_id,
                      const enhance::EnhancementResult& result) {
  json diag;
  diag["file_id"] = file_id;
  diag["method"] = enhance::method_id(result.method);
  diag["snr_est_db"] = result.snr_est_db;
  diag["alpha_prime"] = result.alpha_prime;
  diag["noise_ref_span"] = {result.noise_ref_span.first,
                            result.noise_ref_span.second};
  diag["degenerate_noise_estimate"] = result.degenerate_noise_estimate;
  diag["band_weights"] = json::array();
  for (const auto& [band, weight] : result.band_weights) {
    diag["band_weights"].push_back(
        {{"f_low_hz", band.f_low}, {"f_high_hz", band.f_high}, {"weight", weight}});
  }
  return diag;
}

enhance::EnhancementResult run_method(const signal::Waveform& x,
                                      enhance::Method method,
                                      const enhance::MabeConfig& mabe_cfg) {
  switch (method) {
    case enhance::Method::Mabe: return enhance::mabe_enhance(x, mabe_cfg);
    case enhance::Method::SpecSub:
      return enhance::specsub_baseline(x, mabe_cfg.stft);
    case enhance::Method::MmseStsa:
      return enhance::mmse_enhance(x, enhance::MmseMode::Stsa, mabe_cfg.stft);
    case enhance::Method::MmseLsa:
      return enhance::mmse_enhance(x, enhance::MmseMode::Lsa, mabe_cfg.stft);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

EnhanceOutcome run_enhance(const RunConfig& cfg) {
  cfg.validate();
  const std::vector<fs::path> inputs = list_wavs(cfg.input_dir);
  if (inputs.empty()) {
    throw UsageError("no WAV files in " + cfg.input_dir.string());
  }
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec || !fs::is_directory(cfg.output_dir)) {
    throw IoError("cannot create output directory: " + cfg.output_dir.string());
  }

  const std::vector<enhance::Method> methods = selected_methods(cfg.method);
  const std::size_t n_clips = inputs.size();
  const std::size_t n_methods = methods.size();

  // One slot per (clip, method); slots keep report order deterministic no
  // matter how the workers are scheduled.
  std::vector<PerFileRow> rows(n_clips * n_methods);
  std::vector<char> row_valid(n_clips * n_methods, 0);
  std::atomic<std::size_t> next_clip{0};
  std::atomic<int> skipped{0};
  std::mutex log_mutex;

  auto worker = [&]() {
    while (true) {
      const std::size_t clip = next_clip.fetch_add(1);
      if (clip >= n_clips) break;
      const fs::path& path = inputs[clip];
      const std::string stem = path.stem().string();
      signal::Waveform x;
      try {
        x = signal::read_wav(path);
        if (x.sample_rate != 22050) {
          std::lock_guard<std::mutex> lock(log_mutex);
          std::cerr << "warning: " << path.filename().string() << " is "
                    << x.sample_rate << " Hz (not resampled)\n";
        }
        const double before_snr = metrics::proxy_seg_snr(x);
        for (std::size_t mi = 0; mi < n_methods; ++mi) {
          const auto t0 = std::chrono::steady_clock::now();
          const enhance::EnhancementResult result =
              run_method(x, methods[mi], cfg.mabe);
          const auto t1 = std::chrono::steady_clock::now();

          const std::string id = enhance::method_id(methods[mi]);
          const fs::path wav_out = cfg.output_dir / (stem + "." + id + ".wav");
          signal::write_wav(wav_out, result.enhanced);
          std::ofstream diag_out(cfg.output_dir / (stem + "." + id + ".json"),
                                 std::ios::trunc);
          diag_out << diagnostics_json(stem, result).dump(2) << "\n";

          PerFileRow row;
          row.file_id = stem;
          row.method = id;
          // Digital-silence clips make the proxy SegSNR -inf; pin the row
          // so reports stay valid JSON.
          const double improvement =
              metrics::proxy_seg_snr(result.enhanced) - before_snr;
          if (std::isfinite(improvement)) {
            row.snr_improvement_db = improvement;
          } else {
            row.snr_improvement_db =
                std::isnan(improvement) ? 0.0 : (improvement < 0 ? -999.0 : 999.0);
          }
          row.isd = metrics::isd(x, result.enhanced, cfg.mabe.stft);
          row.runtime_ms =
              std::chrono::duration<double, std::milli>(t1 - t0).count();
          rows[clip * n_methods + mi] = std::move(row);
          row_valid[clip * n_methods + mi] = 1;
        }
      } catch (const std::exception& e) {
        skipped.fetch_add(1);
        std::lock_guard<std::mutex> lock(log_mutex);
        std::cerr << "error: skipping " << path.filename().string() << ": "
                  << e.what() << "\n";
      }
    }
  };

  const int n_workers = std::min<int>(cfg.jobs, static_cast<int>(n_clips));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  EnhanceOutcome outcome;
  outcome.report.corpus_fingerprint = corpus_fingerprint(inputs);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (row_valid[i]) outcome.report.per_file.push_back(rows[i]);
  }
  outcome.report.aggregate = aggregate_rows(outcome.report.per_file, methods);
  outcome.skipped = skipped.load();
  outcome.processed = static_cast<int>(n_clips) - outcome.skipped;
  write_report(cfg.output_dir / "report.json", outcome.report);

  if (cfg.verbose) {
    std::lock_guard<std::mutex> lock(log_mutex);
    std::cerr << "enhanced " << outcome.processed << " clip(s) with "
              << n_methods << " method(s)";
    if (outcome.skipped > 0) std::cerr << ", skipped " << outcome.skipped;
    std::cerr << "\n";
  }
  return outcome;
}

void write_feature_csv(const fs::path& path,
                       const std::vector<metrics::FeatureVector>& features) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(features.size()),
                    metrics::FeatureVector::kDims);
  for (std::size_t i = 0; i < features.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = features[i].as_vector().transpose();
  }
  io::write_csv_matrix(path, m,
                       {"mean_amp", "std_amp", "max_abs_amp", "mean_abs_amp",
                        "zcr", "mean_mag", "std_mag", "dom_freq_pos",
                        "total_spec_energy", "spectral_centroid_hz"});
}

std::vector<metrics::FeatureVector> read_feature_csv(const fs::path& path) {
  const Eigen::MatrixXd m = io::read_csv_matrix(path);
  if (m.cols() != metrics::FeatureVector::kDims) {
    throw IoError("feature CSV must have " +
                  std::to_string(metrics::FeatureVector::kDims) + " columns: " +
                  path.string());
  }
  std::vector<metrics::FeatureVector> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out.push_back(metrics::FeatureVector::from_vector(m.row(i).transpose()));
  }
  return out;
}

json run_metrics(const fs::path& real_dir, const fs::path& gen_dir,
                 const MetricsOptions& opts) {
  const std::vector<fs::path> real_files = list_wavs(real_dir);
  const std::vector<fs::path> gen_files = list_wavs(gen_dir);
  if (real_files.empty() || gen_files.empty()) {
    throw UsageError("metric directories must both contain WAV files");
  }

  json out;
  out["n_real"] = real_files.size();
  out["n_gen"] = gen_files.size();

  if (opts.want_isd) {
    std::set<std::string> real_names, gen_names;
    for (const auto& f : real_files) real_names.insert(f.filename().string());
    for (const auto& f : gen_files) gen_names.insert(f.filename().string());
    for (const auto& name : real_names) {
      if (!gen_names.count(name)) {
        throw UsageError("unpaired file for ISD: " + name);
      }
    }
    for (const auto& name : gen_names) {
      if (!real_names.count(name)) {
        throw UsageError("unpaired file for ISD: " + name);
      }
    }
    double acc = 0.0;
    for (const auto& f : real_files) {
      const signal::Waveform ref = signal::read_wav(f);
      const signal::Waveform tst = signal::read_wav(gen_dir / f.filename());
      acc += metrics::isd(ref, tst);
    }
    out["isd_paired_mean"] = acc / static_cast<double>(real_files.size());
  }

  const bool want_features = opts.want_jsd || opts.want_ndb ||
                             !opts.features_out_real.empty() ||
                             !opts.features_out_gen.empty();
  if (want_features) {
    std::vector<metrics::FeatureVector> real_feats, gen_feats;
    real_feats.reserve(real_files.size());
    gen_feats.reserve(gen_files.size());
    for (const auto& f : real_files) {
      real_feats.push_back(metrics::extract_features(signal::read_wav(f)));
    }
    for (const auto& f : gen_files) {
      gen_feats.push_back(metrics::extract_features(signal::read_wav(f)));
    }
    if (!opts.features_out_real.empty()) {
      write_feature_csv(opts.features_out_real, real_feats);
    }
    if (!opts.features_out_gen.empty()) {
      write_feature_csv(opts.features_out_gen, gen_feats);
    }
    if (opts.want_jsd) {
      metrics::HistogramSpec hspec;
      hspec.bins_per_dim = opts.jsd_bins;
      out["jsd"] = metrics::jsd_features(real_feats, gen_feats, hspec);
    }
    if (opts.want_ndb) {
      if (static_cast<int>(real_feats.size()) < opts.ndb_k) {
        throw UsageError("NDB needs at least " + std::to_string(opts.ndb_k) +
                         " real clips (have " +
                         std::to_string(real_feats.size()) + ")");
      }
      out["ndb"] = metrics::ndb(real_feats, gen_feats, opts.ndb_k,
                                opts.ndb_alpha, opts.seed);
      out["ndb_k"] = opts.ndb_k;
    }
  }

  if (opts.want_frechet) {
    if (opts.embeddings_real.empty() || opts.embeddings_gen.empty()) {
      throw UsageError("frechet requested without embedding CSVs");
    }
    const metrics::GaussianFit fit_real =
        metrics::fit_gaussian(io::read_csv_matrix(opts.embeddings_real));
    const metrics::GaussianFit fit_gen =
        metrics::fit_gaussian(io::read_csv_matrix(opts.embeddings_gen));
    out["frechet"] = metrics::frechet_distance(fit_real, fit_gen);
  }
  return out;
}

namespace {

std::string format_clip_id(int index) {
  std::ostringstream out;
  out << "clip_" << std::setw(3) << std::setfill('0') << index;
  return out.str();
}

const std::vector<std::string>& manifest_header() {
  static const std::vector<std::string> header = {
      "clip_id",        "f_start_hz",     "f_end_hz",
      "n_harmonics",    "syllable_count", "syllable_len_s",
      "gap_len_s",      "envelope",       "amplitude",
      "call_seed",      "noise_kind",     "noise_seed",
      "target_segsnr_db", "achieved_segsnr_db", "clean_path",
      "noise_path",     "mix_path"};
  return header;
}

}  // namespace

std::vector<ManifestRow> run_synth(const SynthOptions& opts) {
  if (opts.count < 1) throw UsageError("count must be >= 1");
  if (opts.snr_list_db.empty()) throw UsageError("snr list must be non-empty");
  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec || !fs::is_directory(opts.out_dir)) {
    throw IoError("cannot create output directory: " + opts.out_dir.string());
  }

  constexpr std::array<synth::NoiseKind, 3> kinds = {
      synth::NoiseKind::White, synth::NoiseKind::Pink, synth::NoiseKind::LowHum};
  const auto& presets = synth::call_presets();

  std::vector<ManifestRow> rows;
  rows.reserve(static_cast<std::size_t>(opts.count));
  for (int i = 0; i < opts.count; ++i) {
    ManifestRow row;
    row.clip_id = format_clip_id(i);
    row.call = presets[static_cast<std::size_t>(i) % presets.size()];
    row.call.seed = opts.master_seed + static_cast<std::uint64_t>(i);
    row.noise_kind = kinds[static_cast<std::size_t>(i) % kinds.size()];
    row.noise_seed = row.call.seed + 0x9E3779B97F4A7C15ULL;
    row.target_segsnr_db =
        opts.snr_list_db[static_cast<std::size_t>(i) % opts.snr_list_db.size()];

    const signal::Waveform clean = synth::gen_call(row.call);
    const signal::Waveform noise = synth::gen_noise(
        row.noise_kind, clean.samples.size(), row.noise_seed);
    synth::GroundTruthMix mix =
        synth::mix_at_segsnr(clean, noise, row.target_segsnr_db);

    // Rescale the whole triple when the mix would clip on disk; a common
    // factor keeps mix == clean + noise and leaves the SNR untouched.
    const double peak =
        std::max({mix.mix.samples.abs().maxCoeff(),
                  mix.clean.samples.abs().maxCoeff(),
                  mix.noise.samples.abs().maxCoeff()});
    if (peak > 0.99) {
      const double scale = 0.99 / peak;
      mix.clean.samples *= scale;
      mix.noise.samples *= scale;
      mix.mix.samples *= scale;
      mix.achieved_segsnr_db =
          synth::active_frame_segsnr(mix.clean, mix.noise);
    }
    row.achieved_segsnr_db = mix.achieved_segsnr_db;

    row.clean_path = row.clip_id + "_clean.wav";
    row.noise_path = row.clip_id + "_noise.wav";
    row.mix_path = row.clip_id + "_mix.wav";
    signal::write_wav(opts.out_dir / row.clean_path, mix.clean);
    signal::write_wav(opts.out_dir / row.noise_path, mix.noise);
    signal::write_wav(opts.out_dir / row.mix_path, mix.mix);
    rows.push_back(std::move(row));
  }

  std::ofstream out(opts.out_dir / "manifest.csv", std::ios::trunc);
  if (!out) {
    throw IoError("cannot write manifest in " + opts.out_dir.string());
  }
  const auto& header = manifest_header();
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << header[i] << (i + 1 < header.size() ? "," : "\n");
  }
  out.precision(10);
  for (const auto& row : rows) {
    out << row.clip_id << ',' << row.call.f_start_hz << ',' << row.call.f_end_hz
        << ',' << row.call.n_harmonics << ',' << row.call.syllable_count << ','
        << row.call.syllable_len_s << ',' << row.call.gap_len_s << ','
        << synth::envelope_name(row.call.envelope) << ',' << row.call.amplitude
        << ',' << row.call.seed << ',' << synth::noise_kind_name(row.noise_kind)
        << ',' << row.noise_seed << ',' << row.target_segsnr_db << ','
        << row.achieved_segsnr_db << ',' << row.clean_path << ','
        << row.noise_path << ',' << row.mix_path << "\n";
  }
  return rows;
}

std::vector<ManifestRow> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read manifest: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty manifest: " + path.string());

  std::vector<ManifestRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> f = io::split_csv_line(line);
    if (f.size() != manifest_header().size()) {
      throw IoError("malformed manifest row: " + line);
    }
    ManifestRow row;
    row.clip_id = f[0];
    row.call.f_start_hz = std::stod(f[1]);
    row.call.f_end_hz = std::stod(f[2]);
    row.call.n_harmonics = std::stoi(f[3]);
    row.call.syllable_count = std::stoi(f[4]);
    row.call.syllable_len_s = std::stod(f[5]);
    row.call.gap_len_s = std::stod(f[6]);
    row.call.envelope = synth::envelope_from_name(f[7]);
    row.call.amplitude = std::stod(f[8]);
    row.call.seed = std::stoull(f[9]);
    row.noise_kind = synth::noise_kind_from_name(f[10]);
    row.noise_seed = std::stoull(f[11]);
    row.target_segsnr_db = std::stod(f[12]);
    row.achieved_segsnr_db = std::stod(f[13]);
    row.clean_path = f[14];
    row.noise_path = f[15];
    row.mix_path = f[16];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ComparisonRow> run_report(
    const std::vector<fs::path>& report_paths, const fs::path& out_markdown,
    const fs::path& out_csv) {
  if (report_paths.empty()) throw UsageError("at least one report required");

  std::vector<Report> reports;
  reports.reserve(report_paths.size());
  for (const auto& p : report_paths) reports.push_back(read_report(p));

  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].corpus_fingerprint != reports[0].corpus_fingerprint) {
      throw UsageError("reports come from different corpora: " +
                       reports[0].corpus_fingerprint + " vs " +
                       reports[i].corpus_fingerprint);
    }
  }

  std::vector<PerFileRow> merged;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& report : reports) {
    for (const auto& row : report.per_file) {
      if (!seen.insert({row.file_id, row.method}).second) {
        throw UsageError("duplicate row for " + row.file_id + "/" + row.method);
      }
      merged.push_back(row);
    }
  }

  const std::vector<enhance::Method> order =
      selected_methods(MethodSelect::All);
  const std::vector<MethodAggregate> aggregates = aggregate_rows(merged, order);
  if (aggregates.empty()) throw UsageError("reports contain no rows");

  std::vector<ComparisonRow> table;
  for (const auto& agg : aggregates) {
    ComparisonRow row;
    row.method = agg.method;
    row.snr_improvement_db = agg.snr_improvement_db_mean;
    row.isd = agg.isd_mean;
    row.files = agg.files;
    table.push_back(std::move(row));
  }

  std::ofstream md(out_markdown, std::ios::trunc);
  if (!md) throw IoError("cannot write " + out_markdown.string());
  md << "| Method | SNR Improvement (dB) | ISD |\n";
  md << "|---|---:|---:|\n";
  md.setf(std::ios::fixed);
  md.precision(2);
  for (const auto& row : table) {
    const enhance::Method m = [&] {
      for (enhance::Method cand : order) {
        if (enhance::method_id(cand) == row.method) return cand;
      }
      return enhance::Method::Mabe;
    }();
    md << "| " << enhance::method_display(m) << " | "
       << (row.snr_improvement_db >= 0 ? "+" : "") << row.snr_improvement_db
       << " | " << row.isd << " |\n";
  }

  std::ofstream csv(out_csv, std::ios::trunc);
  if (!csv) throw IoError("cannot write " + out_csv.string());
  csv << "method,snr_improvement_db,isd,files\n";
  csv.precision(10);
  for (const auto& row : table) {
    csv << row.method << ',' << row.snr_improvement_db << ',' << row.isd << ','
        << row.files << "\n";
  }
  return table;
}

}  // namespace biobench::pipeline

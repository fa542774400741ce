#ifndef BIOBENCH_PIPELINE_HPP
#define BIOBENCH_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "biobench/enhance.hpp"
#include "biobench/metrics.hpp"
#include "biobench/synth.hpp"

namespace biobench::pipeline {

/// Thrown for violated command preconditions (maps to exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown for unreadable inputs / unwritable outputs (maps to exit code 3).
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class MethodSelect { Mabe, SpecSub, MmseStsa, MmseLsa, All };

MethodSelect method_select_from_name(const std::string& name);
std::vector<enhance::Method> selected_methods(MethodSelect sel);

struct RunConfig {
  std::filesystem::path input_dir;
  std::filesystem::path output_dir;
  MethodSelect method = MethodSelect::All;
  enhance::MabeConfig mabe;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool verbose = false;

  void validate() const;
};

struct PerFileRow {
  std::string file_id;
  std::string method;
  double snr_improvement_db = 0.0;
  double isd = 0.0;
  double runtime_ms = 0.0;
};

struct MethodAggregate {
  std::string method;
  int files = 0;
  double snr_improvement_db_mean = 0.0;
  double snr_improvement_db_std = 0.0;
  double isd_mean = 0.0;
  double isd_std = 0.0;
  double runtime_ms_mean = 0.0;
};

struct Report {
  std::string corpus_fingerprint;
  std::vector<PerFileRow> per_file;
  std::vector<MethodAggregate> aggregate;
};

nlohmann::json report_to_json(const Report& report);
Report report_from_json(const nlohmann::json& j);
void write_report(const std::filesystem::path& path, const Report& report);
Report read_report(const std::filesystem::path& path);

/// FNV-1a over the sorted input file names; identifies a corpus listing.
std::string corpus_fingerprint(const std::vector<std::filesystem::path>& files);

/// Sorted .wav listing of a directory.
std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& dir);

struct EnhanceOutcome {
  Report report;
  int processed = 0;
  int skipped = 0;  // unreadable/failed clips (partial failure when > 0)
};

/// Enhances every input clip with every selected method, writing
/// <stem>.<method>.wav plus a diagnostics JSON per output and report.json
/// into the output directory.
EnhanceOutcome run_enhance(const RunConfig& cfg);

struct MetricsOptions {
  bool want_isd = true;
  bool want_jsd = true;
  bool want_ndb = true;
  bool want_frechet = false;
  std::filesystem::path embeddings_real;
  std::filesystem::path embeddings_gen;
  // When set, the extracted 10-dim feature vectors are dumped as CSV
  // (one clip per row) for external tooling.
  std::filesystem::path features_out_real;
  std::filesystem::path features_out_gen;
  int ndb_k = 20;
  double ndb_alpha = 0.05;
  int jsd_bins = 50;
  std::uint64_t seed = metrics::kNdbDefaultSeed;
};

/// Corpus-level metrics between a real and a generated directory.
/// ISD is paired and requires identical file names on both sides.
nlohmann::json run_metrics(const std::filesystem::path& real_dir,
                           const std::filesystem::path& gen_dir,
                           const MetricsOptions& opts);

/// Feature-set CSV interop: one vector per row, named header columns.
void write_feature_csv(const std::filesystem::path& path,
                       const std::vector<metrics::FeatureVector>& features);
std::vector<metrics::FeatureVector> read_feature_csv(
    const std::filesystem::path& path);

struct SynthOptions {
  int count = 12;
  std::filesystem::path out_dir;
  std::uint64_t master_seed = 0;
  std::vector<double> snr_list_db = {-5.0};
};

struct ManifestRow {
  std::string clip_id;
  synth::CallSpec call;
  synth::NoiseKind noise_kind = synth::NoiseKind::White;
  std::uint64_t noise_seed = 0;
  double target_segsnr_db = 0.0;
  double achieved_segsnr_db = 0.0;
  std::string clean_path;
  std::string noise_path;
  std::string mix_path;
};

/// Generates clean/noise/mix triples cycling through the call presets,
/// noise kinds and SNR targets; writes WAVs plus manifest.csv.
std::vector<ManifestRow> run_synth(const SynthOptions& opts);

std::vector<ManifestRow> read_manifest(const std::filesystem::path& path);

struct ComparisonRow {
  std::string method;
  double snr_improvement_db = 0.0;
  double isd = 0.0;
  int files = 0;
};

/// Merges enhancement reports from one corpus into a method-comparison
/// table (markdown + CSV twins). Reports from different corpora are
/// rejected.
std::vector<ComparisonRow> run_report(
    const std::vector<std::filesystem::path>& report_paths,
    const std::filesystem::path& out_markdown,
    const std::filesystem::path& out_csv);

}  // namespace biobench::pipeline

#endif  // BIOBENCH_PIPELINE_HPP

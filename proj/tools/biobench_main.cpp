#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "biobench/pipeline.hpp"

namespace {

using biobench::pipeline::IoError;
using biobench::pipeline::UsageError;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPartial = 2;
constexpr int kExitIo = 3;

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("malformed config " + path + ": " + e.what());
  }
  return j;
}

// Precedence: explicit flag > config file > BIOBENCH_SEED > 0.
std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t flag_value,
                           const json& config) {
  if (seed_opt->count() > 0) return flag_value;
  if (config.contains("seed")) return config["seed"].get<std::uint64_t>();
  if (const char* env = std::getenv("BIOBENCH_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("BIOBENCH_SEED is not an integer");
    }
  }
  return 0;
}

template <typename T>
T config_or(const json& config, const std::string& key, T fallback) {
  if (config.contains(key)) return config[key].get<T>();
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bird-call enhancement and evaluation toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  int jobs = 1;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON config file (flags override)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* jobs_opt = app.add_option("--jobs", jobs, "worker count");
  app.add_flag("--verbose", verbose, "log progress to stderr");

  // enhance
  auto* cmd_enhance = app.add_subcommand("enhance", "enhance a directory of WAVs");
  cmd_enhance->fallthrough();
  std::string in_dir, out_dir, method = "all";
  cmd_enhance->add_option("-i,--input", in_dir, "input directory");
  cmd_enhance->add_option("-o,--output", out_dir, "output directory");
  cmd_enhance->add_option("-m,--method", method,
                          "mabe|specsub|mmse_stsa|mmse_lsa|all");

  // metrics
  auto* cmd_metrics = app.add_subcommand("metrics", "corpus metrics");
  cmd_metrics->fallthrough();
  std::string real_dir, gen_dir, emb_real, emb_gen, metrics_out;
  int ndb_k = 20;
  double ndb_alpha = 0.05;
  bool no_isd = false;
  cmd_metrics->add_option("--real", real_dir, "reference corpus directory");
  cmd_metrics->add_option("--gen", gen_dir, "generated/processed directory");
  cmd_metrics->add_option("--embeddings-real", emb_real, "embedding CSV (real)");
  cmd_metrics->add_option("--embeddings-gen", emb_gen, "embedding CSV (gen)");
  std::string feat_real, feat_gen;
  cmd_metrics->add_option("--ndb-k", ndb_k, "NDB bin count");
  cmd_metrics->add_option("--ndb-alpha", ndb_alpha, "NDB significance level");
  cmd_metrics->add_flag("--no-isd", no_isd, "skip the paired ISD metric");
  cmd_metrics->add_option("--out", metrics_out, "write JSON here (default stdout)");
  cmd_metrics->add_option("--features-out-real", feat_real,
                          "dump extracted features (real side) as CSV");
  cmd_metrics->add_option("--features-out-gen", feat_gen,
                          "dump extracted features (generated side) as CSV");

  // synth
  auto* cmd_synth = app.add_subcommand("synth", "generate the synthetic corpus");
  cmd_synth->fallthrough();
  int count = 12;
  std::string synth_out;
  std::vector<double> snr_list;
  cmd_synth->add_option("-n,--count", count, "number of clips");
  cmd_synth->add_option("-o,--output", synth_out, "output directory");
  cmd_synth->add_option("--snr", snr_list, "target SegSNR values in dB");

  // report
  auto* cmd_report = app.add_subcommand("report", "merge reports into a table");
  cmd_report->fallthrough();
  std::vector<std::string> report_paths;
  std::string report_prefix = "comparison";
  cmd_report->add_option("reports", report_paths, "report JSON files");
  cmd_report->add_option("--out-prefix", report_prefix,
                         "output prefix for .md/.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    const json config = load_config(config_path);
    seed = resolve_seed(seed_opt, seed, config);
    if (jobs_opt->count() == 0) jobs = config_or(config, "jobs", 1);
    verbose = verbose || config_or(config, "verbose", false);

    if (cmd_enhance->parsed()) {
      biobench::pipeline::RunConfig cfg;
      cfg.input_dir = in_dir.empty()
                          ? config_or<std::string>(config, "input_dir", "")
                          : in_dir;
      cfg.output_dir = out_dir.empty()
                           ? config_or<std::string>(config, "output_dir", "")
                           : out_dir;
      const std::string method_name =
          cmd_enhance->get_option("--method")->count() > 0
              ? method
              : config_or<std::string>(config, "method", "all");
      cfg.method = biobench::pipeline::method_select_from_name(method_name);
      cfg.seed = seed;
      cfg.jobs = jobs;
      cfg.verbose = verbose;
      const auto outcome = biobench::pipeline::run_enhance(cfg);
      return outcome.skipped > 0 ? kExitPartial : kExitOk;
    }

    if (cmd_metrics->parsed()) {
      if (real_dir.empty() || gen_dir.empty()) {
        throw UsageError("metrics requires --real and --gen");
      }
      biobench::pipeline::MetricsOptions opts;
      opts.want_isd = !no_isd;
      opts.ndb_k = ndb_k;
      opts.ndb_alpha = ndb_alpha;
      opts.seed = seed != 0 ? seed : biobench::metrics::kNdbDefaultSeed;
      opts.embeddings_real = emb_real;
      opts.embeddings_gen = emb_gen;
      opts.want_frechet = !emb_real.empty() || !emb_gen.empty();
      opts.features_out_real = feat_real;
      opts.features_out_gen = feat_gen;
      const json result =
          biobench::pipeline::run_metrics(real_dir, gen_dir, opts);
      if (metrics_out.empty()) {
        std::cout << result.dump(2) << "\n";
      } else {
        std::ofstream out(metrics_out, std::ios::trunc);
        if (!out) throw IoError("cannot write " + metrics_out);
        out << result.dump(2) << "\n";
      }
      return kExitOk;
    }

    if (cmd_synth->parsed()) {
      biobench::pipeline::SynthOptions opts;
      opts.count = count;
      opts.out_dir = synth_out.empty()
                         ? config_or<std::string>(config, "output_dir", "")
                         : synth_out;
      if (opts.out_dir.empty()) throw UsageError("synth requires --output");
      opts.master_seed = seed;
      if (!snr_list.empty()) opts.snr_list_db = snr_list;
      const auto rows = biobench::pipeline::run_synth(opts);
      if (verbose) {
        std::cerr << "wrote " << rows.size() << " triple(s) to "
                  << opts.out_dir.string() << "\n";
      }
      return kExitOk;
    }

    if (cmd_report->parsed()) {
      if (report_paths.empty()) throw UsageError("report requires input files");
      std::vector<std::filesystem::path> paths(report_paths.begin(),
                                               report_paths.end());
      biobench::pipeline::run_report(paths, report_prefix + ".md",
                                     report_prefix + ".csv");
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

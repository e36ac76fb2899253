// Command-line front end: dataset simulation, model fitting, replication
// studies, sampler spot checks, and parameter recovery from screening-item
// probability tables. Every command writes a manifest recording the exact
// invocation, resolved configuration, and content digests of inputs and
// outputs; re-running a manifest's command reproduces the numeric outputs
// byte for byte.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isingimpute/datagen.hpp"
#include "isingimpute/fit.hpp"
#include "isingimpute/io.hpp"
#include "isingimpute/metrics.hpp"
#include "isingimpute/recovery.hpp"
#include "isingimpute/studies.hpp"
#include "isingimpute/version.hpp"

namespace {

using namespace isingimpute;
namespace fs = std::filesystem;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitEmptyCompleteCase = 4;

class ManifestWriter {
 public:
  ManifestWriter(std::vector<std::string> argv, fs::path path)
      : path_(std::move(path)), start_(std::chrono::steady_clock::now()) {
    manifest_["command"] = std::move(argv);
    manifest_["version"] = kVersion;
  }

  void set_config(json config) { manifest_["config"] = std::move(config); }
  void set_seed(std::uint64_t seed) { manifest_["seed"] = seed; }

  void add_input(const fs::path& p) {
    manifest_["inputs"][p.string()] = digest_file(p);
  }

  void write_output(const fs::path& p, const std::string& content) {
    write_text_file(p, content);
    manifest_["outputs"][p.string()] = digest_hex(content);
  }

  void finish() {
    manifest_["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_)
            .count();
    if (!manifest_.contains("inputs")) manifest_["inputs"] = json::object();
    if (!manifest_.contains("outputs")) manifest_["outputs"] = json::object();
    write_text_file(path_, manifest_.dump(2) + "\n");
  }

 private:
  fs::path path_;
  json manifest_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    out.push_back(std::stoi(token));
  }
  if (out.empty()) throw ValidationError("empty integer list");
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    out.push_back(std::stod(token));
  }
  if (out.empty()) throw ValidationError("empty numeric list");
  return out;
}

json chain_config_to_json(const ChainConfig& c) {
  return json{{"total_iterations", c.total_iterations},
              {"burn_in", c.burn_in},
              {"thinning", c.thinning},
              {"seed", c.seed},
              {"n_chains", c.n_chains},
              {"record_beta", c.record_beta},
              {"priors",
               {{"intercept_variance", c.priors.intercept_variance},
                {"slope_variance", c.priors.slope_variance}}}};
}

// Config-file values fill any field the command line left untouched.
void apply_chain_config_file(const json& file, const CLI::App& cmd,
                             ChainConfig& config) {
  const auto unset = [&](const std::string& flag) {
    return cmd.get_option(flag)->count() == 0;
  };
  if (file.contains("total_iterations") && unset("--iters")) {
    config.total_iterations = file["total_iterations"].get<int>();
  }
  if (file.contains("burn_in") && unset("--burnin")) {
    config.burn_in = file["burn_in"].get<int>();
  }
  if (file.contains("thinning") && unset("--thin")) {
    config.thinning = file["thinning"].get<int>();
  }
  if (file.contains("seed") && unset("--seed")) {
    config.seed = file["seed"].get<std::uint64_t>();
  }
  if (file.contains("n_chains") && unset("--chains")) {
    config.n_chains = file["n_chains"].get<int>();
  }
  if (file.contains("record_beta")) {
    config.record_beta = file["record_beta"].get<bool>();
  }
  if (file.contains("priors")) {
    const json& priors = file["priors"];
    if (priors.contains("intercept_variance") &&
        unset("--prior-intercept-var")) {
      config.priors.intercept_variance =
          priors["intercept_variance"].get<double>();
    }
    if (priors.contains("slope_variance") && unset("--prior-slope-var")) {
      config.priors.slope_variance = priors["slope_variance"].get<double>();
    }
  }
}

json diagnostics_to_json(const FitResult& result) {
  json psrf = json::array();
  for (Eigen::Index i = 0; i < result.diagnostics.psrf.size(); ++i) {
    psrf.push_back(result.diagnostics.psrf[i]);
  }
  // Timing lives in the manifest; this file holds only reproducible values.
  json out{{"method", method_name(result.method)},
           {"chains", result.per_parameter_chains.size()},
           {"retained_draws", result.draws.size()},
           {"invariants_ok", result.diagnostics.invariants_ok}};
  if (result.diagnostics.psrf.size() > 0) {
    out["psrf"] = std::move(psrf);
    out["max_psrf"] = result.diagnostics.max_psrf;
  }
  return out;
}

struct SimulateArgs {
  std::string study;
  int j = 0;
  std::string s_spec = "zero";
  int n = 0;
  std::uint64_t seed = 0;
  int gibbs_burnin = 500;
  std::string out = "dataset.csv";
  std::string truth = "truth.json";
};

int run_simulate(const SimulateArgs& args,
                 const std::vector<std::string>& argv) {
  if (args.study.empty() && args.j == 0) {
    throw ValidationError("simulate needs --study or --j");
  }
  IsingMatrix truth(1);
  MissingnessSpec missing;
  bool has_missing = false;
  if (!args.study.empty()) {
    const StudyId id = parse_study_id(args.study);
    truth = load_true_parameters(id);
    missing = study_missingness(id);
    has_missing = true;
  } else {
    if (args.s_spec != "zero") {
      throw ValidationError("only --s zero is supported with --j");
    }
    truth = IsingMatrix(args.j);
  }
  if (args.n < 1) throw ValidationError("simulate needs --n >= 1");

  ManifestWriter manifest(argv, fs::path(args.out).string() +
                                    ".manifest.json");
  manifest.set_seed(args.seed);
  manifest.set_config(json{{"study", args.study},
                           {"j", truth.dim()},
                           {"n", args.n},
                           {"seed", args.seed},
                           {"out", args.out},
                           {"truth", args.truth}});

  RngStream rng(args.seed);
  MatrixXd y;
  if (truth.dim() <= kMaxExactSamplingDim) {
    y = sample_ising_exact(truth, args.n, rng.sub(0));
  } else {
    y = sample_ising_gibbs(truth, args.n, args.gibbs_burnin, rng.sub(0));
  }
  ObservedDataset data =
      has_missing
          ? apply_missingness(y, missing, rng.sub(1))
          : [&] {
              CellMatrix cells(y.rows(), y.cols());
              for (Eigen::Index i = 0; i < y.rows(); ++i) {
                for (Eigen::Index c = 0; c < y.cols(); ++c) {
                  cells(i, c) = static_cast<std::int8_t>(y(i, c));
                }
              }
              return ObservedDataset(std::move(cells));
            }();

  manifest.write_output(args.out, dataset_to_csv(data));
  manifest.write_output(args.truth, matrix_to_json(truth).dump(2) + "\n");
  manifest.finish();
  std::cout << "wrote " << args.out << " (" << data.n_rows() << " x "
            << data.n_items() << ", " << data.missing_count()
            << " missing cells) and " << args.truth << "\n";
  return 0;
}

struct FitArgs {
  std::string data;
  std::string method = "proposed";
  std::string out_prefix = "fit";
  std::string config_file;
  double viz_threshold = 0.5;
  int threads = 0;
  ChainConfig chain;
};

int run_fit_command(const FitArgs& args, const CLI::App& cmd,
                    const std::vector<std::string>& argv) {
  ChainConfig config = args.chain;
  ManifestWriter manifest(argv, args.out_prefix + ".manifest.json");
  if (!args.config_file.empty()) {
    manifest.add_input(args.config_file);
    apply_chain_config_file(json::parse(read_text_file(args.config_file)),
                            cmd, config);
  }
  config.validate();
  manifest.set_seed(config.seed);
  json cfg = chain_config_to_json(config);
  cfg["method"] = args.method;
  cfg["viz_threshold"] = args.viz_threshold;
  manifest.set_config(cfg);
  manifest.add_input(args.data);

  const ObservedDataset data = read_dataset_csv(args.data);
  std::vector<Method> methods;
  if (args.method == "all") {
    methods = {Method::kProposed, Method::kSingleImputation,
               Method::kCompleteCase};
  } else {
    methods = {parse_method(args.method)};
  }

  for (const Method method : methods) {
    FitResult result = [&] {
      switch (method) {
        case Method::kProposed:
          return run_fit(data, config, args.threads);
        case Method::kSingleImputation:
          return fit_single_imputation(data, config, args.threads);
        default:
          return fit_complete_case(data, config, args.threads);
      }
    }();
    const std::string stem = args.out_prefix + "_" + method_name(method);
    json estimate = matrix_to_json(result.estimate);
    estimate["method"] = method_name(method);
    estimate["seed"] = config.seed;
    manifest.write_output(stem + "_estimate.json", estimate.dump(2) + "\n");
    manifest.write_output(stem + "_draws.csv",
                          draws_to_csv(result, data.n_items()));
    manifest.write_output(stem + "_diagnostics.json",
                          diagnostics_to_json(result).dump(2) + "\n");
    manifest.write_output(
        stem + "_network.dot",
        network_to_dot(result.estimate, args.viz_threshold));
    std::cout << method_name(method) << ": estimate written to " << stem
              << "_estimate.json";
    if (result.diagnostics.psrf.size() > 0) {
      std::cout << " (max PSRF " << format_double(result.diagnostics.max_psrf)
                << ")";
    }
    std::cout << "\n";
  }
  manifest.finish();
  return 0;
}

struct StudyArgs {
  std::string study;
  int reps = 50;
  std::string n_list;
  std::string methods = "default";
  std::string outdir = "study_out";
  int threads = 0;
  ChainConfig chain;
};

int run_study_command(const StudyArgs& args,
                      const std::vector<std::string>& argv) {
  StudyOptions options;
  options.id = parse_study_id(args.study);
  options.replications = args.reps;
  if (!args.n_list.empty()) {
    options.sample_sizes = parse_int_list(args.n_list);
  }
  options.chain = args.chain;
  options.threads = args.threads;
  if (args.methods == "proposed") {
    options.methods = {Method::kProposed};
  } else if (args.methods == "all") {
    options.methods = {Method::kProposed, Method::kSingleImputation,
                       Method::kCompleteCase};
  } else if (args.methods != "default") {
    throw ValidationError("--methods must be default, proposed or all");
  }

  fs::create_directories(args.outdir);
  ManifestWriter manifest(argv,
                          (fs::path(args.outdir) / "manifest.json").string());
  manifest.set_seed(options.chain.seed);
  json cfg = chain_config_to_json(options.chain);
  cfg["study"] = args.study;
  cfg["replications"] = options.replications;
  manifest.set_config(cfg);

  const StudyResult result = run_study(options);
  const std::string tag = "study_" + study_name(result.id);
  for (std::size_t n_index = 0; n_index < result.sample_sizes.size();
       ++n_index) {
    const std::string n_tag =
        tag + "_n" + std::to_string(result.sample_sizes[n_index]);
    manifest.write_output(
        fs::path(args.outdir) / (n_tag + "_table.csv"),
        study_table_csv(result, static_cast<int>(n_index)));
  }
  manifest.write_output(fs::path(args.outdir) / (tag + "_long.csv"),
                        study_long_csv(result));

  if (result.id == StudyId::kStudyIII) {
    std::ostringstream summary;
    summary << "n,auc,jaccard_0.3\n";
    for (std::size_t n_index = 0; n_index < result.sample_sizes.size();
         ++n_index) {
      const ReplicationSet reps =
          result.replication_set(static_cast<int>(n_index), 0);
      const std::string n_tag =
          tag + "_n" + std::to_string(result.sample_sizes[n_index]);
      manifest.write_output(fs::path(args.outdir) / (n_tag + "_roc.csv"),
                            study_roc_csv(reps));
      manifest.write_output(fs::path(args.outdir) / (n_tag + "_jaccard.csv"),
                            study_jaccard_csv(reps));
      summary << result.sample_sizes[n_index] << ','
              << format_double(auc(roc_curve(reps, roc_breakpoints(reps))))
              << ',' << format_double(jaccard(reps, 0.3)) << '\n';
    }
    manifest.write_output(fs::path(args.outdir) / (tag + "_summary.csv"),
                          summary.str());
  }
  manifest.finish();
  std::cout << "study " << study_name(result.id) << " finished; tables in "
            << args.outdir << "\n";
  return 0;
}

struct PgTestArgs {
  std::string c_list = "0,0.5,1,2,5,20";
  int draws = 100000;
  std::uint64_t seed = 0;
  std::string out = "pg_test.csv";
};

int run_pg_test(const PgTestArgs& args, const std::vector<std::string>& argv) {
  if (args.draws < 100) throw ValidationError("pg-test needs --draws >= 100");
  ManifestWriter manifest(argv, args.out + ".manifest.json");
  manifest.set_seed(args.seed);
  manifest.set_config(json{{"c", args.c_list},
                           {"draws", args.draws},
                           {"seed", args.seed},
                           {"out", args.out}});
  std::ostringstream out;
  out << "c,n_draws,empirical_mean,pg_mean,z_score\n";
  const std::vector<double> cs = parse_double_list(args.c_list);
  for (std::size_t k = 0; k < cs.size(); ++k) {
    RngStream rng = RngStream(args.seed).sub(k);
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < args.draws; ++i) {
      const double x = sample_pg1(cs[k], rng);
      sum += x;
      sq += x * x;
    }
    const double mean = sum / args.draws;
    const double sd = std::sqrt(sq / args.draws - mean * mean);
    const double z =
        (mean - pg_mean(cs[k])) / (sd / std::sqrt(double(args.draws)));
    out << format_double(cs[k]) << ',' << args.draws << ','
        << format_double(mean) << ',' << format_double(pg_mean(cs[k])) << ','
        << format_double(z) << '\n';
  }
  manifest.write_output(args.out, out.str());
  manifest.finish();
  std::cout << "wrote " << args.out << "\n";
  return 0;
}

struct RecoverArgs {
  std::string probs;
  std::string out = "recovered.json";
};

int run_recover(const RecoverArgs& args,
                const std::vector<std::string>& argv) {
  ManifestWriter manifest(argv, args.out + ".manifest.json");
  manifest.add_input(args.probs);
  manifest.set_config(json{{"probs", args.probs}, {"out", args.out}});
  const RestrictedDistribution r =
      parse_restricted_csv(read_text_file(args.probs));
  const IsingMatrix recovered = recover_from_restricted(r);
  manifest.write_output(args.out, matrix_to_json(recovered).dump(2) + "\n");
  manifest.finish();
  std::cout << "recovered " << recovered.dim() << " x " << recovered.dim()
            << " matrix into " << args.out << "\n";
  return 0;
}

void add_chain_options(CLI::App* cmd, ChainConfig& chain, int* threads) {
  cmd->add_option("--iters", chain.total_iterations, "MCMC length T");
  cmd->add_option("--burnin", chain.burn_in, "burn-in size T0");
  cmd->add_option("--thin", chain.thinning, "thinning step t0");
  cmd->add_option("--seed", chain.seed, "master seed");
  cmd->add_option("--chains", chain.n_chains, "number of chains");
  cmd->add_flag("--record-beta", chain.record_beta,
                "record auxiliary coefficient draws");
  cmd->add_option("--prior-intercept-var", chain.priors.intercept_variance,
                  "prior variance of intercepts");
  cmd->add_option("--prior-slope-var", chain.priors.slope_variance,
                  "prior variance of edge weights");
  cmd->add_option("--threads", *threads,
                  "worker threads (0 = ISING_IMPUTE_THREADS or hardware)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ising network estimation with iterative imputation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "generate a dataset with a masking mechanism");
  simulate->add_option("--study", sim.study, "study id I, II or III");
  simulate->add_option("--j", sim.j, "custom model dimension");
  simulate->add_option("--s", sim.s_spec, "custom parameter spec (zero)");
  simulate->add_option("--n", sim.n, "number of rows")->required();
  simulate->add_option("--seed", sim.seed, "seed");
  simulate->add_option("--gibbs-burnin", sim.gibbs_burnin,
                       "per-row sweeps when J exceeds the exact bound");
  simulate->add_option("--out", sim.out, "dataset CSV path");
  simulate->add_option("--truth", sim.truth, "truth JSON path");

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "fit a dataset");
  fit->add_option("--data", fit_args.data, "dataset CSV")->required();
  fit->add_option("--method", fit_args.method,
                  "proposed, single, complete or all");
  fit->add_option("--out-prefix", fit_args.out_prefix, "output file prefix");
  fit->add_option("--config", fit_args.config_file,
                  "JSON config (flags override)");
  fit->add_option("--viz-threshold", fit_args.viz_threshold,
                  "|weight| cutoff for the DOT export");
  add_chain_options(fit, fit_args.chain, &fit_args.threads);

  StudyArgs study_args;
  CLI::App* study = app.add_subcommand(
      "study", "run a replication study and emit metric tables");
  study->add_option("--study", study_args.study, "study id I, II or III")
      ->required();
  study->add_option("--reps", study_args.reps, "replication count");
  study->add_option("--n", study_args.n_list, "comma-separated sample sizes");
  study->add_option("--methods", study_args.methods,
                    "default, proposed or all");
  study->add_option("--outdir", study_args.outdir, "output directory");
  add_chain_options(study, study_args.chain, &study_args.threads);

  PgTestArgs pg_args;
  CLI::App* pg = app.add_subcommand(
      "pg-test", "moment checks for the Polya-Gamma sampler");
  pg->add_option("--c", pg_args.c_list, "comma-separated c grid");
  pg->add_option("--draws", pg_args.draws, "draws per c");
  pg->add_option("--seed", pg_args.seed, "seed");
  pg->add_option("--out", pg_args.out, "output CSV");

  RecoverArgs rec_args;
  CLI::App* recover = app.add_subcommand(
      "recover", "recover parameters from a probability-table CSV");
  recover->add_option("--probs", rec_args.probs, "restricted CSV")
      ->required();
  recover->add_option("--out", rec_args.out, "output JSON");

  std::vector<std::string> argv_copy(argv, argv + argc);
  try {
    app.parse(argc, argv);
    if (*simulate) return run_simulate(sim, argv_copy);
    if (*fit) return run_fit_command(fit_args, *fit, argv_copy);
    if (*study) return run_study_command(study_args, argv_copy);
    if (*pg) return run_pg_test(pg_args, argv_copy);
    if (*recover) return run_recover(rec_args, argv_copy);
    return kExitValidation;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  } catch (const EmptyCompleteCaseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEmptyCompleteCase;
  } catch (const SpdError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "isingimpute/datagen.hpp"
#include "isingimpute/fit.hpp"
#include "isingimpute/io.hpp"
#include "isingimpute/metrics.hpp"
#include "isingimpute/parallel.hpp"

namespace isingimpute {

// Replication harness for the three simulation studies:
// generate -> mask -> fit (each configured method) -> per-parameter metrics.
struct StudyOptions {
  StudyId id = StudyId::kStudyI;
  int replications = 50;
  std::vector<int> sample_sizes;  // empty = study default
  ChainConfig chain;              // chain.seed is the master seed
  std::vector<Method> methods;    // empty = study default
  int threads = 0;                // 0 = resolve from env/hardware
};

// The complete-case and single-imputation baselines are only compared on the
// six-item studies; under 50% MCAR at fifteen items there are essentially no
// complete rows.
inline std::vector<Method> default_study_methods(StudyId id) {
  if (id == StudyId::kStudyIII) return {Method::kProposed};
  return {Method::kProposed, Method::kSingleImputation,
          Method::kCompleteCase};
}

inline std::vector<int> default_sample_sizes(StudyId id) {
  if (id == StudyId::kStudyII) return {8000};
  return {1000, 2000, 4000, 8000};
}

struct StudyResult {
  StudyId id = StudyId::kStudyI;
  IsingMatrix truth{1};
  std::vector<int> sample_sizes;
  std::vector<Method> methods;
  // estimates[n_index][method_index][replication]
  std::vector<std::vector<std::vector<IsingMatrix>>> estimates;

  ReplicationSet replication_set(int n_index, int method_index) const {
    return ReplicationSet{truth, estimates[static_cast<std::size_t>(n_index)]
                                     [static_cast<std::size_t>(method_index)]};
  }
};

namespace detail {

// Each replication owns a data stream and a fit seed derived from the
// master seed and its (study, n, replication) coordinates, so any cell of
// the design can be reproduced in isolation.
inline RngStream study_data_stream(std::uint64_t master, StudyId id,
                                   int n_index, int rep) {
  return RngStream(master, 0xDA7A0000ULL + static_cast<int>(id))
      .sub(static_cast<std::uint64_t>(n_index))
      .sub(static_cast<std::uint64_t>(rep));
}

inline std::uint64_t study_fit_seed(std::uint64_t master, StudyId id,
                                    int n_index, int rep) {
  return RngStream(master, 0xF170000ULL + static_cast<int>(id))
      .sub(static_cast<std::uint64_t>(n_index))
      .sub(static_cast<std::uint64_t>(rep))
      .stream_id();
}

inline FitResult dispatch_fit(Method method, const ObservedDataset& data,
                              const ChainConfig& config) {
  switch (method) {
    case Method::kProposed:
      return run_fit(data, config);
    case Method::kSingleImputation:
      return fit_single_imputation(data, config);
    default:
      return fit_complete_case(data, config);
  }
}

}  // namespace detail

inline ObservedDataset generate_study_dataset(StudyId id, int n,
                                              RngStream data_rng) {
  const IsingMatrix truth = load_true_parameters(id);
  const MatrixXd y = sample_ising_exact(truth, n, data_rng.sub(0));
  return apply_missingness(y, study_missingness(id), data_rng.sub(1));
}

inline StudyResult run_study(const StudyOptions& options) {
  StudyResult result;
  result.id = options.id;
  result.truth = load_true_parameters(options.id);
  result.sample_sizes = options.sample_sizes.empty()
                            ? default_sample_sizes(options.id)
                            : options.sample_sizes;
  result.methods = options.methods.empty()
                       ? default_study_methods(options.id)
                       : options.methods;
  if (options.replications < 1) {
    throw ValidationError("study needs at least one replication");
  }

  const int n_count = static_cast<int>(result.sample_sizes.size());
  const int m_count = static_cast<int>(result.methods.size());
  result.estimates.assign(
      static_cast<std::size_t>(n_count),
      std::vector<std::vector<IsingMatrix>>(
          static_cast<std::size_t>(m_count),
          std::vector<IsingMatrix>(
              static_cast<std::size_t>(options.replications),
              IsingMatrix(result.truth.dim()))));

  // One task per (n, method, replication); every task regenerates its
  // replication's dataset from the shared stream, which keeps tasks
  // independent while methods still see identical data.
  const int total = n_count * m_count * options.replications;
  parallel_for(total, resolve_threads(options.threads), [&](int task) {
    const int n_index = task / (m_count * options.replications);
    const int rest = task % (m_count * options.replications);
    const int m_index = rest / options.replications;
    const int rep = rest % options.replications;
    const int n = result.sample_sizes[static_cast<std::size_t>(n_index)];
    const ObservedDataset data = generate_study_dataset(
        options.id, n,
        detail::study_data_stream(options.chain.seed, options.id, n_index,
                                  rep));
    ChainConfig config = options.chain;
    config.seed =
        detail::study_fit_seed(options.chain.seed, options.id, n_index, rep);
    result.estimates[static_cast<std::size_t>(n_index)]
                    [static_cast<std::size_t>(m_index)]
                    [static_cast<std::size_t>(rep)] =
        detail::dispatch_fit(result.methods[static_cast<std::size_t>(m_index)],
                             data, config)
            .estimate;
  });
  return result;
}

// Wide per-sample-size table, one row per parameter with an MSE and bias
// column pair per method.
inline std::string study_table_csv(const StudyResult& result, int n_index) {
  std::vector<std::vector<MseBiasEntry>> tables;
  for (int m = 0; m < static_cast<int>(result.methods.size()); ++m) {
    tables.push_back(mse_bias(result.replication_set(n_index, m)));
  }
  std::ostringstream out;
  out << "parameter";
  for (const Method m : result.methods) {
    out << ',' << method_name(m) << "_mse," << method_name(m) << "_bias";
  }
  out << '\n';
  for (std::size_t p = 0; p < tables.front().size(); ++p) {
    const auto& head = tables.front()[p];
    out << 's' << '_' << (head.i + 1) << '_' << (head.j + 1);
    for (const auto& table : tables) {
      out << ',' << format_double(table[p].mse) << ','
          << format_double(table[p].bias);
    }
    out << '\n';
  }
  return out.str();
}

// Plot-ready long format covering every (n, method, parameter) cell.
inline std::string study_long_csv(const StudyResult& result) {
  std::ostringstream out;
  out << "study,n,method,row,col,kind,truth,mse,bias\n";
  for (int n_index = 0; n_index < static_cast<int>(result.sample_sizes.size());
       ++n_index) {
    for (int m = 0; m < static_cast<int>(result.methods.size()); ++m) {
      const auto table = mse_bias(result.replication_set(n_index, m));
      for (const auto& entry : table) {
        out << study_name(result.id) << ','
            << result.sample_sizes[static_cast<std::size_t>(n_index)] << ','
            << method_name(result.methods[static_cast<std::size_t>(m)]) << ','
            << (entry.i + 1) << ',' << (entry.j + 1) << ','
            << (entry.i == entry.j ? "intercept" : "edge") << ','
            << format_double(entry.truth) << ',' << format_double(entry.mse)
            << ',' << format_double(entry.bias) << '\n';
      }
    }
  }
  return out.str();
}

inline std::string study_roc_csv(const ReplicationSet& reps) {
  const auto curve = roc_curve(reps, roc_breakpoints(reps));
  std::ostringstream out;
  out << "tau,tpr,fpr\n";
  for (const auto& point : curve) {
    out << format_double(point.threshold) << ',' << format_double(point.tpr)
        << ',' << format_double(point.fpr) << '\n';
  }
  return out.str();
}

inline std::string study_jaccard_csv(const ReplicationSet& reps) {
  std::ostringstream out;
  out << "tau,jaccard\n";
  for (int k = 1; k <= 30; ++k) {
    const double tau = 0.05 * k;
    out << format_double(tau) << ',' << format_double(jaccard(reps, tau))
        << '\n';
  }
  return out.str();
}

}  // namespace isingimpute

#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "isingimpute/dataset.hpp"
#include "isingimpute/gibbs.hpp"
#include "isingimpute/model.hpp"
#include "isingimpute/parallel.hpp"
#include "isingimpute/rng.hpp"
#include "isingimpute/transforms.hpp"

namespace isingimpute {

// MCMC controls shared by all estimators.
struct ChainConfig {
  int total_iterations = 5000;
  int burn_in = 1000;
  int thinning = 10;
  PriorSpec priors;
  std::uint64_t seed = 0;
  int n_chains = 1;
  bool record_beta = false;

  int retained_per_chain() const {
    return total_iterations / thinning - burn_in / thinning;
  }

  void validate() const {
    priors.validate();
    if (total_iterations < 1 || burn_in < 0 ||
        burn_in >= total_iterations || thinning < 1) {
      throw ValidationError(
          "chain config requires 0 <= burn_in < total_iterations and "
          "thinning >= 1");
    }
    if (retained_per_chain() < 1) {
      throw ValidationError("chain config retains no draws");
    }
    if (n_chains < 1) throw ValidationError("need at least one chain");
  }
};

enum class Method { kProposed, kSingleImputation, kCompleteCase };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::kProposed:
      return "proposed";
    case Method::kSingleImputation:
      return "single_imputation";
    default:
      return "complete_case";
  }
}

inline Method parse_method(const std::string& text) {
  if (text == "proposed") return Method::kProposed;
  if (text == "single") return Method::kSingleImputation;
  if (text == "complete") return Method::kCompleteCase;
  throw ValidationError("unknown method '" + text +
                        "' (expected proposed/single/complete/all)");
}

struct Diagnostics {
  VectorXd psrf;  // per half-vector coordinate; empty for a single chain
  double max_psrf = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = 0.0;
  bool invariants_ok = true;
};

struct FitResult {
  IsingMatrix estimate;
  std::vector<IsingMatrix> draws;            // chain-major retained draws
  std::vector<MatrixXd> per_parameter_chains;  // per chain: retained x q
  std::vector<MatrixXd> beta_chains;  // per chain, when record_beta is set
  Diagnostics diagnostics;
  Method method = Method::kProposed;
};

// Redraws column j at exactly the rows in missing_set from the Bernoulli
// conditionals implied by beta_j; observed cells are never touched.
inline void impute_column(int j, MatrixXd& y, const VectorXd& beta_j,
                          const std::vector<int>& missing_set,
                          RngStream rng) {
  const int dim = static_cast<int>(y.cols());
  for (const int i : missing_set) {
    double logit = 0.5 * beta_j[j];
    for (int k = 0; k < dim; ++k) {
      if (k != j) logit += beta_j[k] * y(i, k);
    }
    RngStream cell = rng.sub(static_cast<std::uint64_t>(i));
    y(i, j) = cell.uniform() <= sigmoid(logit) ? 1.0 : 0.0;
  }
}

// Potential scale reduction factor per parameter from >= 2 chains of equal
// length (no chain splitting): sqrt(((n-1)/n W + B/n) / W), with the
// convention PSRF = 1 when the within-chain variance is exactly zero.
inline VectorXd gelman_rubin(const std::vector<MatrixXd>& chains) {
  if (chains.size() < 2) {
    throw ValidationError("Gelman-Rubin needs at least two chains");
  }
  const Eigen::Index n = chains.front().rows();
  const Eigen::Index q = chains.front().cols();
  if (n < 10) {
    throw ValidationError("Gelman-Rubin needs chains of length >= 10");
  }
  for (const auto& c : chains) {
    if (c.rows() != n || c.cols() != q) {
      throw ValidationError("Gelman-Rubin chains must have equal shapes");
    }
  }
  const double m = static_cast<double>(chains.size());
  const double dn = static_cast<double>(n);
  VectorXd psrf(q);
  for (Eigen::Index p = 0; p < q; ++p) {
    double grand = 0.0;
    std::vector<double> means(chains.size());
    std::vector<double> vars(chains.size());
    for (std::size_t c = 0; c < chains.size(); ++c) {
      const auto col = chains[c].col(p);
      means[c] = col.mean();
      vars[c] = (col.array() - means[c]).square().sum() / (dn - 1.0);
      grand += means[c];
    }
    grand /= m;
    double between = 0.0;
    double within = 0.0;
    for (std::size_t c = 0; c < chains.size(); ++c) {
      between += (means[c] - grand) * (means[c] - grand);
      within += vars[c];
    }
    between *= dn / (m - 1.0);
    within /= m;
    if (within == 0.0) {
      psrf[p] = 1.0;
    } else {
      psrf[p] = std::sqrt(((dn - 1.0) / dn * within + between / dn) / within);
    }
  }
  return psrf;
}

namespace detail {

struct ChainOutput {
  MatrixXd alpha_draws;  // retained x q
  MatrixXd beta_draws;   // retained x J*J when requested
  MatrixXd final_y;      // captured when requested
};

// One chain of the interleaved sampler. The three estimators are the same
// driver with stages switched off:
//   proposed            = imputation loop + thinned S sampling
//   complete-data fit   = thinned S sampling only (data must be complete)
//   imputation-only run = imputation loop only, final dataset captured
// The S-step substreams are keyed by (seed, chain, iteration) alone, so on
// complete data the retained S chain is identical with or without the
// imputation loop running alongside.
inline ChainOutput run_single_chain(const ObservedDataset& data,
                                    const ChainConfig& config,
                                    int chain_index, bool with_imputation,
                                    bool with_s_sampling,
                                    bool capture_final_y) {
  const int dim = data.n_items();
  const int q = half_vec_length(dim);
  RngStream chain_rng(config.seed, static_cast<std::uint64_t>(chain_index));
  RngStream body = chain_rng.sub(stream_tag::kChainBody);

  MatrixXd y = data.initial_fill(chain_rng.sub(stream_tag::kChainInitMissing));

  RngStream init_state = chain_rng.sub(stream_tag::kChainInitState);
  IsingMatrix s(dim);
  for (int j = 0; j < dim; ++j) {
    for (int l = j; l < dim; ++l) {
      s.set(l, j, 0.1 * (2.0 * init_state.uniform() - 1.0));
    }
  }
  std::vector<VectorXd> beta(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    beta[static_cast<std::size_t>(j)] = s.values().col(j);
  }

  const TransformSet transforms(dim);
  ChainOutput out;
  const int retained = config.retained_per_chain();
  out.alpha_draws.resize(with_s_sampling ? retained : 0, q);
  if (config.record_beta && with_imputation) {
    out.beta_draws.resize(retained, dim * dim);
  }
  int r = 0;
  for (int t = 1; t <= config.total_iterations; ++t) {
    RngStream iter = body.sub(static_cast<std::uint64_t>(t));
    if (with_imputation) {
      for (int j = 0; j < dim; ++j) {
        RngStream jr = iter.sub(static_cast<std::uint64_t>(j));
        beta[static_cast<std::size_t>(j)] =
            sample_beta(y, j, config.priors,
                        beta[static_cast<std::size_t>(j)], jr);
        if (!data.missing_set(j).empty()) {
          impute_column(j, y, beta[static_cast<std::size_t>(j)],
                        data.missing_set(j), jr.sub(stream_tag::kImpute));
        }
      }
    }
    if (with_s_sampling && t > config.burn_in && t % config.thinning == 0) {
      s = sample_alpha(y, config.priors, s, transforms,
                       iter.sub(stream_tag::kAlphaStep));
      out.alpha_draws.row(r) = vech(s).values();
      if (out.beta_draws.size() > 0) {
        for (int j = 0; j < dim; ++j) {
          out.beta_draws.row(r).segment(j * dim, dim) =
              beta[static_cast<std::size_t>(j)];
        }
      }
      ++r;
    }
  }
  if (capture_final_y) out.final_y = std::move(y);
  return out;
}

inline FitResult assemble_result(std::vector<ChainOutput> chains,
                                 const ChainConfig& config, int dim,
                                 Method method, double wall_seconds) {
  const int q = half_vec_length(dim);
  const int retained = config.retained_per_chain();
  FitResult result{IsingMatrix(dim), {}, {}, {}, {}, method};
  result.draws.reserve(static_cast<std::size_t>(retained) * chains.size());
  MatrixXd acc = MatrixXd::Zero(dim, dim);
  for (auto& chain : chains) {
    for (int r = 0; r < retained; ++r) {
      const VectorXd alpha = chain.alpha_draws.row(r);
      result.draws.push_back(vech_inverse(HalfVec(dim, alpha)));
      acc += result.draws.back().values();
    }
    result.per_parameter_chains.push_back(std::move(chain.alpha_draws));
    if (chain.beta_draws.size() > 0) {
      result.beta_chains.push_back(std::move(chain.beta_draws));
    }
  }
  acc /= static_cast<double>(result.draws.size());
  result.estimate = IsingMatrix(acc, 0.0);

  result.diagnostics.wall_seconds = wall_seconds;
  if (config.n_chains >= 2) {
    result.diagnostics.psrf = gelman_rubin(result.per_parameter_chains);
    result.diagnostics.max_psrf = result.diagnostics.psrf.maxCoeff();
  }
  // Sanity flags recorded rather than asserted: exact draw symmetry and the
  // estimate being the draw mean are structural here.
  bool ok = true;
  for (const auto& draw : result.draws) {
    const MatrixXd transposed = draw.values().transpose();
    if ((draw.values().array() != transposed.array()).any()) ok = false;
  }
  MatrixXd mean_check = MatrixXd::Zero(dim, dim);
  for (const auto& draw : result.draws) mean_check += draw.values();
  mean_check /= static_cast<double>(result.draws.size());
  if ((mean_check - result.estimate.values()).cwiseAbs().maxCoeff() > 1e-14) {
    ok = false;
  }
  (void)q;
  result.diagnostics.invariants_ok = ok;
  return result;
}

template <typename ChainFn>
FitResult run_method(const ChainConfig& config, int dim, Method method,
                     int n_threads, ChainFn&& chain_fn) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<ChainOutput> chains(
      static_cast<std::size_t>(config.n_chains));
  parallel_for(config.n_chains, resolve_threads(n_threads), [&](int k) {
    chains[static_cast<std::size_t>(k)] = chain_fn(k);
  });
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return assemble_result(std::move(chains), config, dim, method, wall);
}

}  // namespace detail

// The full interleaved estimator: per iteration, a Polya-Gamma refresh of
// every auxiliary coefficient vector followed by imputation of its missing
// cells, with thinned joint draws of S after burn-in. The estimate is the
// mean of the retained S draws across chains.
inline FitResult run_fit(const ObservedDataset& data,
                         const ChainConfig& config, int n_threads = 1) {
  config.validate();
  return detail::run_method(
      config, data.n_items(), Method::kProposed, n_threads, [&](int k) {
        return detail::run_single_chain(data, config, k, true, true, false);
      });
}

// Listwise deletion followed by complete-data sampling of S only.
inline FitResult fit_complete_case(const ObservedDataset& data,
                                   const ChainConfig& config,
                                   int n_threads = 1) {
  config.validate();
  const ObservedDataset complete_cases = listwise_delete(data);
  FitResult result = detail::run_method(
      config, data.n_items(), Method::kCompleteCase, n_threads, [&](int k) {
        return detail::run_single_chain(complete_cases, config, k, false,
                                        true, false);
      });
  return result;
}

// Runs the imputation loop to its final iteration, freezes that completed
// dataset, and fits it as complete data.
inline FitResult fit_single_imputation(const ObservedDataset& data,
                                       const ChainConfig& config,
                                       int n_threads = 1) {
  config.validate();
  FitResult result = detail::run_method(
      config, data.n_items(), Method::kSingleImputation, n_threads,
      [&](int k) {
        detail::ChainOutput pass =
            detail::run_single_chain(data, config, k, true, false, true);
        CellMatrix cells(pass.final_y.rows(), pass.final_y.cols());
        for (Eigen::Index i = 0; i < pass.final_y.rows(); ++i) {
          for (Eigen::Index j = 0; j < pass.final_y.cols(); ++j) {
            cells(i, j) = static_cast<std::int8_t>(pass.final_y(i, j));
          }
        }
        return detail::run_single_chain(ObservedDataset(std::move(cells)),
                                        config, k, false, true, false);
      });
  return result;
}

}  // namespace isingimpute

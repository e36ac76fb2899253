// Minimal end-to-end walk-through: simulate screening-item data, fit it with
// the iterative-imputation sampler and the complete-case baseline, and print
// the estimated edge between the two screening items under each method.

#include <iostream>

#include "isingimpute/datagen.hpp"
#include "isingimpute/fit.hpp"
#include "isingimpute/io.hpp"
#include "isingimpute/studies.hpp"

int main() {
  using namespace isingimpute;

  const StudyId study = StudyId::kStudyII;
  const IsingMatrix truth = load_true_parameters(study);
  RngStream data_rng(7);
  const MatrixXd complete = sample_ising_exact(truth, 2000, data_rng.sub(0));
  const ObservedDataset data =
      apply_missingness(complete, study_missingness(study), data_rng.sub(1));

  ChainConfig config;
  config.total_iterations = 2000;
  config.burn_in = 500;
  config.thinning = 10;
  config.seed = 1;

  const FitResult proposed = run_fit(data, config);
  const FitResult complete_case = fit_complete_case(data, config);

  std::cout << "true s_12            = " << truth(0, 1) << "\n"
            << "iterative imputation = " << proposed.estimate(0, 1) << "\n"
            << "complete cases only  = " << complete_case.estimate(0, 1)
            << "\n";
  std::cout << "\nnetwork (|weight| > 0.5):\n"
            << network_to_dot(proposed.estimate, 0.5);
  return 0;
}

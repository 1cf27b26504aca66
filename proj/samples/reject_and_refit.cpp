// Drop k rows chosen obliviously of the labels, refit on the rest, and compare
// the error with the full fit. Then solve a consistent system with the
// sketched Kaczmarz solver.

#include <iostream>

#include "lcr/lab/generate.hpp"
#include "lcr/lcr.hpp"

int main() {
  lcr::lab::ExperimentConfig cfg;
  cfg.n = 200;
  cfg.d = 4;
  cfg.noise = 0.5;
  cfg.seed = 7;
  const lcr::Dataset data = lcr::lab::generate_dataset(cfg);

  const lcr::FittedProblem fitted = lcr::fit(data);
  const lcr::LeverageProfile profile = lcr::leverage_scores(fitted.svd);

  const std::size_t k = 8;
  lcr::RngStream rng(cfg.seed);
  const lcr::RejectionResult drawn = lcr::RejectionSampler(fitted.svd, profile, k).sample(rng);
  const lcr::DeficientFit refit = lcr::deficient_solve(data, fitted, drawn.subset());

  std::cout << "dropped rows      " << drawn.subset().to_string() << " after " << drawn.trials << " proposals\n"
            << "optimal error     " << fitted.full.opt_error << "\n"
            << "error after drop  " << refit.full_error << "\n"
            << "bound on mean     "
            << (1.0 + 4.0 * k * k / ((200.0 - 4.0 * k) * (200.0 - 4.0 * k))) * fitted.full.opt_error << "\n";

  cfg.noise = 0.0;
  cfg.kappa = 1e4;
  cfg.n = 1024;
  const lcr::lab::GeneratedProblem consistent = lcr::lab::generate_problem(cfg);
  const std::size_t K = 600;
  const lcr::KaczmarzRun run = lcr::kaczmarz_fast(consistent.data, K, rng);
  std::cout << "kaczmarz labels   " << run.labels_used << " of " << consistent.data.n() << "\n"
            << "weight error      " << (run.w - consistent.w_planted).norm() / consistent.w_planted.norm() << "\n";
}

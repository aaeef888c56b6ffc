#ifndef DEEPCLIFE_CROSS_VALIDATION_HPP_
#define DEEPCLIFE_CROSS_VALIDATION_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "deepclife/dataset.hpp"
#include "deepclife/evaluation.hpp"
#include "deepclife/trainer.hpp"

namespace deepclife {

struct CvOptions {
  std::size_t folds = 5;
  /// Training subjects drawn from the non-test folds; 0 uses all of them.
  std::size_t n_train = 0;
  std::int64_t w_fixed = 10;
  /// Also score a uniformly random assignment on each test fold.
  bool random_control = false;
  /// L2 strengths tried on every fold; the one with the best validation
  /// objective is kept. Empty uses config.l2 alone.
  std::vector<double> l2_grid;
};

struct FoldResult {
  std::size_t fold = 0;
  std::uint64_t seed = 0;
  EvalReport report;
  std::optional<EvalReport> control;
  std::size_t best_epoch = 0;
  std::size_t epochs_run = 0;
  double l2 = 0.0;
  double best_validation = 0.0;
};

struct MeanSe {
  double mean = 0.0;
  /// Standard error of the mean across folds (sample sd / sqrt(folds)).
  double se = 0.0;
};

MeanSe mean_se(std::span<const double> values);

struct CvResult {
  std::vector<FoldResult> folds;
  MeanSe c_index, ibs, logrank;
  std::optional<MeanSe> ari;
  std::optional<MeanSe> control_c_index, control_ari;
};

/// Fold membership for `n` subjects: a seeded shuffle cut into near-equal parts.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, std::size_t folds,
                                                 std::uint64_t seed);

/// Holds out each fold in turn, trains on (a sample of) the rest with a
/// validation split, and evaluates on the held-out fold.
CvResult cross_validate(const Dataset& data, const TrainConfig& config,
                        const CvOptions& options,
                        std::optional<std::span<const std::size_t>> truth = std::nullopt);

/// Per-fold and aggregate `key = value` lines, then a one-line table row of
/// percentages in the form `mean (se)`.
void write_cv_report(std::ostream& out, const CvResult& result);

}  // namespace deepclife

#endif  // DEEPCLIFE_CROSS_VALIDATION_HPP_

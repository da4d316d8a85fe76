#ifndef KARNET_EVAL_HPP
#define KARNET_EVAL_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "karnet/data.hpp"
#include "karnet/matrix.hpp"
#include "karnet/trainer.hpp"

namespace karnet {

/// Percent of rows whose argmax over the score columns matches the label.
/// Ties resolve to the lowest column index.
double accuracy(const Matrix& scores, const std::vector<int>& labels);

/// Single-output variant: predict class 1 when the score clears the threshold.
double accuracy_threshold(const Matrix& scores, const std::vector<int>& labels,
                          double threshold = 0.5);

/// Mean squared error over all entries.
double mse(const Matrix& predicted, const Matrix& target);

/// Assign each row to one of k folds so that every class is spread across
/// folds with per-class counts differing by at most one. Shuffles each
/// class's rows, then deals them round-robin. Throws ClassTooSmall when a
/// class has fewer rows than folds; names, when given, make that error
/// actionable.
std::vector<std::size_t> stratified_kfold(const std::vector<int>& labels, std::size_t folds,
                                          std::uint64_t seed,
                                          const std::vector<std::string>* class_names = nullptr);

/// Hidden-layer shapes as a function of the base width h.
enum class StructureRule {
    two_layer,    // [h, q]
    three_layer,  // [2h, h, q]
    four_layer,   // [4h, 2h, h, q]
};

StructureRule rule_for_depth(std::size_t n_layers);
std::vector<std::size_t> widths_for(StructureRule rule, std::size_t h, std::size_t q);
std::string rule_name(StructureRule rule);

/// Repeated stratified k-fold evaluation with the training recipe held in
/// `train`. The base width is either fixed or chosen once by an inner
/// model-selection pass over hidden_grid on the first trial's first training
/// split (set reselect_per_fold to redo the search inside every fold).
struct CVConfig {
    std::size_t folds = 10;
    std::size_t trials = 10;
    StructureRule rule = StructureRule::two_layer;
    std::vector<std::size_t> hidden_grid = {1, 2, 3, 5, 10, 20, 30, 50, 80, 100, 200, 500};
    std::size_t fixed_h = 0;  // 0 means search the grid
    bool reselect_per_fold = false;
    std::size_t inner_folds = 10;
    std::uint64_t seed = 0;
    TrainConfig train{};

    void validate() const;
};

struct CVReport {
    struct Run {
        std::size_t trial = 0;
        std::size_t fold = 0;
        std::size_t hidden = 0;
        std::uint64_t seed = 0;
        double accuracy = 0.0;
        double seconds = 0.0;
    };

    std::vector<Run> runs;
    double mean_accuracy = 0.0;
    double std_accuracy = 0.0;
    std::size_t chosen_h = 0;
    CVConfig config;

    /// Human-readable summary (includes runtimes, so not byte-stable).
    std::string to_text() const;
    /// Flat per-run CSV with deterministic columns only.
    std::string to_csv() const;
};

/// Pick the grid width with the best mean inner-CV accuracy on the given
/// training subset; ties go to the smaller width.
std::size_t select_hidden(const Dataset& train_subset, const CVConfig& cfg, std::uint64_t seed);

/// Full evaluation protocol over a labeled dataset.
CVReport cross_validate(const Dataset& ds, const CVConfig& cfg);

}  // namespace karnet

#endif

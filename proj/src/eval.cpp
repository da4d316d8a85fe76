#include "karnet/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "karnet/errors.hpp"
#include "karnet/network.hpp"
#include "karnet/rng.hpp"
#include "karnet/textio.hpp"

namespace karnet {

namespace {

// Implementation-independent Fisher-Yates so fold assignments reproduce
// across standard libraries (std::shuffle leaves the draw pattern to the
// library vendor).
void shuffle_indices(std::vector<std::size_t>& v, std::mt19937_64& rng) {
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[rng() % i]);
}

std::vector<std::size_t> rows_where(const std::vector<std::size_t>& assignment, std::size_t fold,
                                    bool equal) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < assignment.size(); ++r)
        if ((assignment[r] == fold) == equal) out.push_back(r);
    return out;
}

}  // namespace

double accuracy(const Matrix& scores, const std::vector<int>& labels) {
    if (scores.rows() != labels.size())
        throw ShapeMismatch("accuracy: " + std::to_string(scores.rows()) + " score rows vs " +
                            std::to_string(labels.size()) + " labels");
    if (scores.cols() < 2)
        throw InvalidArgument("accuracy needs >= 2 score columns; use accuracy_threshold for "
                              "single-output models");
    std::size_t correct = 0;
    for (std::size_t r = 0; r < scores.rows(); ++r) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < scores.cols(); ++c)
            if (scores(r, c) > scores(r, best)) best = c;
        if (static_cast<int>(best) == labels[r]) ++correct;
    }
    return 100.0 * static_cast<double>(correct) / static_cast<double>(scores.rows());
}

double accuracy_threshold(const Matrix& scores, const std::vector<int>& labels, double threshold) {
    if (scores.cols() != 1) throw InvalidArgument("accuracy_threshold expects one score column");
    if (scores.rows() != labels.size())
        throw ShapeMismatch("accuracy_threshold: " + std::to_string(scores.rows()) +
                            " score rows vs " + std::to_string(labels.size()) + " labels");
    std::size_t correct = 0;
    for (std::size_t r = 0; r < scores.rows(); ++r)
        if ((scores(r, 0) >= threshold ? 1 : 0) == labels[r]) ++correct;
    return 100.0 * static_cast<double>(correct) / static_cast<double>(scores.rows());
}

double mse(const Matrix& predicted, const Matrix& target) {
    if (predicted.rows() != target.rows() || predicted.cols() != target.cols())
        throw ShapeMismatch("mse shape mismatch: " + std::to_string(predicted.rows()) + "x" +
                            std::to_string(predicted.cols()) + " vs " +
                            std::to_string(target.rows()) + "x" + std::to_string(target.cols()));
    double acc = 0.0;
    for (std::size_t r = 0; r < predicted.rows(); ++r)
        for (std::size_t c = 0; c < predicted.cols(); ++c) {
            const double d = predicted(r, c) - target(r, c);
            acc += d * d;
        }
    return acc / static_cast<double>(predicted.rows() * predicted.cols());
}

std::vector<std::size_t> stratified_kfold(const std::vector<int>& labels, std::size_t folds,
                                          std::uint64_t seed,
                                          const std::vector<std::string>* class_names) {
    if (folds < 2) throw InvalidArgument("stratified_kfold needs folds >= 2");
    if (labels.empty()) throw InvalidArgument("stratified_kfold needs at least one row");

    std::vector<int> classes = labels;
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    std::vector<std::size_t> assignment(labels.size(), 0);
    std::mt19937_64 rng(seed);
    for (int cls : classes) {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < labels.size(); ++r)
            if (labels[r] == cls) rows.push_back(r);
        if (rows.size() < folds) {
            const std::string name =
                (class_names && cls >= 0 && static_cast<std::size_t>(cls) < class_names->size())
                    ? (*class_names)[static_cast<std::size_t>(cls)]
                    : std::to_string(cls);
            throw ClassTooSmall(name, rows.size(), folds,
                                "class '" + name + "' has " + std::to_string(rows.size()) +
                                    " rows, fewer than " + std::to_string(folds) +
                                    " folds; merge it into a larger class or reduce folds");
        }
        shuffle_indices(rows, rng);
        for (std::size_t j = 0; j < rows.size(); ++j) assignment[rows[j]] = j % folds;
    }
    return assignment;
}

StructureRule rule_for_depth(std::size_t n_layers) {
    switch (n_layers) {
        case 2: return StructureRule::two_layer;
        case 3: return StructureRule::three_layer;
        case 4: return StructureRule::four_layer;
        default:
            throw InvalidArgument("no structure rule for " + std::to_string(n_layers) +
                                  " layers (supported: 2, 3, 4)");
    }
}

std::vector<std::size_t> widths_for(StructureRule rule, std::size_t h, std::size_t q) {
    if (h == 0 || q == 0) throw InvalidArgument("structure widths must be >= 1");
    switch (rule) {
        case StructureRule::two_layer: return {h, q};
        case StructureRule::three_layer: return {2 * h, h, q};
        case StructureRule::four_layer: return {4 * h, 2 * h, h, q};
    }
    throw InvalidArgument("unknown structure rule");
}

std::string rule_name(StructureRule rule) {
    switch (rule) {
        case StructureRule::two_layer: return "two_layer";
        case StructureRule::three_layer: return "three_layer";
        case StructureRule::four_layer: return "four_layer";
    }
    return "unknown";
}

void CVConfig::validate() const {
    if (folds < 2) throw InvalidArgument("cross-validation needs folds >= 2");
    if (trials < 1) throw InvalidArgument("cross-validation needs trials >= 1");
    if (inner_folds < 2) throw InvalidArgument("model selection needs inner_folds >= 2");
    if (fixed_h == 0) {
        if (hidden_grid.empty()) throw InvalidArgument("hidden_grid is empty and fixed_h unset");
        for (std::size_t i = 0; i < hidden_grid.size(); ++i) {
            if (hidden_grid[i] == 0) throw InvalidArgument("hidden_grid widths must be >= 1");
            if (i > 0 && hidden_grid[i] <= hidden_grid[i - 1])
                throw InvalidArgument("hidden_grid must be strictly increasing");
        }
    }
    train.validate();
}

namespace {

double fold_accuracy(const Dataset& train_set, const Dataset& test_set,
                     const std::vector<std::size_t>& widths, const TrainConfig& tc) {
    NetworkSpec spec;
    spec.input_dim = train_set.features();
    spec.widths = widths;
    const TrainResult res = train(train_set.x, train_set.y, spec, tc);
    const Matrix scores = forward(spec, res.weights, augment(test_set.x));
    return accuracy(scores, test_set.labels);
}

}  // namespace

std::size_t select_hidden(const Dataset& train_subset, const CVConfig& cfg, std::uint64_t seed) {
    if (!train_subset.has_labels())
        throw InvalidArgument("model selection needs a labeled dataset");
    const std::size_t q = train_subset.targets();
    const std::vector<std::size_t> assignment = stratified_kfold(
        train_subset.labels, cfg.inner_folds, mix_seed(seed, 0x1d, 0), &train_subset.class_names);

    std::size_t best_h = 0;
    double best_mean = -1.0;
    for (std::size_t h : cfg.hidden_grid) {
        const std::vector<std::size_t> widths = widths_for(cfg.rule, h, q);
        double total = 0.0;
        for (std::size_t f = 0; f < cfg.inner_folds; ++f) {
            const Dataset tr = subset(train_subset, rows_where(assignment, f, false));
            const Dataset te = subset(train_subset, rows_where(assignment, f, true));
            TrainConfig tc = cfg.train;
            tc.seed = mix_seed(seed, h, f);
            // An unstable width scores zero instead of aborting the search;
            // the final fit still surfaces numeric failures.
            try {
                total += fold_accuracy(tr, te, widths, tc);
            } catch (const Error&) {
            }
        }
        const double mean = total / static_cast<double>(cfg.inner_folds);
        if (mean > best_mean + 1e-12) {  // strict improvement; ties keep the smaller width
            best_mean = mean;
            best_h = h;
        }
    }
    return best_h;
}

CVReport cross_validate(const Dataset& ds, const CVConfig& cfg) {
    cfg.validate();
    ds.validate();
    if (!ds.has_labels()) throw InvalidArgument("cross_validate needs a labeled dataset");

    CVReport report;
    report.config = cfg;

    std::size_t global_h = cfg.fixed_h;
    if (global_h == 0 && !cfg.reselect_per_fold) {
        // One search on the first trial's first training split; the chosen
        // width is then reused everywhere, keeping the protocol affordable.
        const std::vector<std::size_t> assignment = stratified_kfold(
            ds.labels, cfg.folds, mix_seed(cfg.seed, 0xf01d, 0), &ds.class_names);
        const Dataset tr = subset(ds, rows_where(assignment, 0, false));
        global_h = select_hidden(tr, cfg, mix_seed(cfg.seed, 0x5e1, 0));
    }
    report.chosen_h = global_h;

    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::vector<std::size_t> assignment = stratified_kfold(
            ds.labels, cfg.folds, mix_seed(cfg.seed, 0xf01d, t), &ds.class_names);
        for (std::size_t f = 0; f < cfg.folds; ++f) {
            const Dataset tr = subset(ds, rows_where(assignment, f, false));
            const Dataset te = subset(ds, rows_where(assignment, f, true));

            std::size_t h = global_h;
            if (cfg.fixed_h == 0 && cfg.reselect_per_fold)
                h = select_hidden(tr, cfg, mix_seed(cfg.seed, 0x5e1, t * cfg.folds + f));

            TrainConfig tc = cfg.train;
            tc.seed = mix_seed(cfg.seed, t, f);

            const auto t0 = std::chrono::steady_clock::now();
            const double acc =
                fold_accuracy(tr, te, widths_for(cfg.rule, h, ds.targets()), tc);
            const auto t1 = std::chrono::steady_clock::now();

            CVReport::Run run;
            run.trial = t;
            run.fold = f;
            run.hidden = h;
            run.seed = tc.seed;
            run.accuracy = acc;
            run.seconds = std::chrono::duration<double>(t1 - t0).count();
            report.runs.push_back(run);
        }
    }

    double total = 0.0;
    for (const CVReport::Run& r : report.runs) total += r.accuracy;
    report.mean_accuracy = total / static_cast<double>(report.runs.size());
    if (report.runs.size() > 1) {
        double ss = 0.0;
        for (const CVReport::Run& r : report.runs) {
            const double d = r.accuracy - report.mean_accuracy;
            ss += d * d;
        }
        report.std_accuracy = std::sqrt(ss / static_cast<double>(report.runs.size() - 1));
    }
    return report;
}

std::string CVReport::to_text() const {
    std::ostringstream out;
    out << "folds = " << config.folds << "\n";
    out << "trials = " << config.trials << "\n";
    out << "rule = " << rule_name(config.rule) << "\n";
    if (config.fixed_h != 0)
        out << "fixed_h = " << config.fixed_h << "\n";
    else
        out << "fixed_h = grid\n";
    out << "chosen_h = " << chosen_h << "\n";
    out << "seed = " << config.seed << "\n";
    out << "runs = " << runs.size() << "\n";
    out << "mean_accuracy = " << format_double(mean_accuracy) << "\n";
    out << "std_accuracy = " << format_double(std_accuracy) << "\n";
    for (const Run& r : runs)
        out << "run trial=" << r.trial << " fold=" << r.fold << " hidden=" << r.hidden
            << " seed=" << r.seed << " accuracy=" << format_double(r.accuracy)
            << " seconds=" << format_double(r.seconds) << "\n";
    return out.str();
}

std::string CVReport::to_csv() const {
    std::ostringstream out;
    out << "trial,fold,hidden,seed,accuracy\n";
    for (const Run& r : runs)
        out << r.trial << "," << r.fold << "," << r.hidden << "," << r.seed << ","
            << format_double(r.accuracy) << "\n";
    return out.str();
}

}  // namespace karnet

#ifndef KARNET_DATA_HPP
#define KARNET_DATA_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "karnet/matrix.hpp"

namespace karnet {

/// A loaded or generated dataset. For categorical data, labels holds the
/// per-row class index and y is the matching 0/1 indicator matrix with one
/// column per class; for regression data labels is empty and y holds raw
/// target columns.
struct Dataset {
    Matrix x;
    Matrix y;
    std::vector<int> labels;
    std::vector<std::string> class_names;

    struct Meta {
        std::string source;
        std::uint64_t seed = 0;
        std::vector<std::size_t> clean_rows;  // noise-free rows, when applicable
    } meta;

    std::size_t samples() const { return x.rows(); }
    std::size_t features() const { return x.cols(); }
    std::size_t targets() const { return y.cols(); }
    bool has_labels() const { return !labels.empty(); }

    void validate() const;
};

// --- synthetic generators -----------------------------------------------------

/// Damped-sine regression set: y = sin(2x)/(2x) at x = 1..8, plus
/// noisy_replicas copies of the eight points under multiplicative uniform
/// noise y (1 + u), u ~ U[-noise_fraction, +noise_fraction]. The first eight
/// rows are the clean points and are flagged in meta.clean_rows.
struct SincConfig {
    double noise_fraction = 0.2;
    std::size_t noisy_replicas = 10;
    std::uint64_t seed = 0;
};
Dataset gen_sinc(const SincConfig& cfg = {});

/// The four-point XOR set with the stabilizing perturbation on the last
/// input: {(0,0), (1,1), (1,0), (0.001,1.001)} with targets {0,0,1,1}.
Dataset gen_xor();

/// Interleaved spiral arms: for t ~ U[0,1], radius r_max t and angle
/// 2 pi turns t + arm offset, plus Gaussian coordinate noise. Labels are the
/// arm index and y is the indicator matrix.
struct SpiralConfig {
    std::size_t points_per_arm = 500;
    std::size_t arms = 3;
    double noise_std = 0.02;
    double turns = 1.5;
    double r_max = 1.0;
    std::uint64_t seed = 0;
};
Dataset gen_spiral(const SpiralConfig& cfg = {});

// --- CSV ingestion -------------------------------------------------------------

/// Per-column encoding recipe for CSV ingestion.
///
/// Plan files are plain text, one directive per line ('#' starts a comment):
///
///   header true|false              default false
///   label first|last|none          label column position (default last)
///   label_numeric true|false      'true' reads the label column as a raw
///                                  regression target instead of a class
///   classes a,b,c                  fixed class order (otherwise sorted order
///                                  of the values found in the file)
///   feature <name> ordinal a,b,c   category i of N encodes as (i+1)/N
///   feature <name> numeric         min-max rescaled to [0,1] from the data
///   feature <name> numeric range <lo> <hi>   fixed affine map to [0,1]
///   feature <name> numeric raw     kept verbatim
///
/// Feature directives are in file column order (label column excluded).
struct EncodingPlan {
    enum class ColumnKind { ordinal_categorical, numeric };
    enum class LabelPosition { first, last, none };
    enum class NumericScaling { minmax, fixed_range, raw };

    struct Column {
        std::string name;
        ColumnKind kind = ColumnKind::numeric;
        std::vector<std::string> categories;      // ordinal order
        NumericScaling scaling = NumericScaling::minmax;
        double range_lo = 0.0, range_hi = 1.0;    // fixed_range only
    };

    std::vector<Column> columns;
    LabelPosition label_position = LabelPosition::last;
    bool label_numeric = false;
    std::vector<std::string> label_classes;
    bool has_header = false;

    static EncodingPlan parse(const std::string& text);
    static EncodingPlan load(const std::string& path);

    /// Uniform plan for headerless all-numeric files (CLI convenience).
    static EncodingPlan all_numeric(std::size_t n_features, LabelPosition pos,
                                    bool numeric_label, NumericScaling scaling);
};

/// Canonical plan text for the benchmark datasets ("nursery", "letter",
/// "optdigit"); the files under data/plans/ ship the same bytes.
std::string builtin_plan_text(const std::string& dataset);

/// Parse and encode a CSV file according to the plan. Deterministic given
/// (file, plan). Row/column indices in errors are 1-based file positions.
Dataset load_csv(const std::string& path, const EncodingPlan& plan);

/// Row-wise concatenation; feature counts and class name lists must agree.
Dataset concat(const Dataset& a, const Dataset& b);

/// Relabel every 'from' row as 'to' and drop 'from' from the class list,
/// rebuilding labels and the indicator matrix.
Dataset merge_class(const Dataset& ds, const std::string& from, const std::string& to);

/// The nursery fix-up: the two 'recommend' rows join 'very_recom' so that
/// every class supports 10-fold stratification.
Dataset nursery_merge(const Dataset& ds);

/// Select rows by index (labels and targets follow).
Dataset subset(const Dataset& ds, const std::vector<std::size_t>& idx);

/// Write features plus label/target columns as CSV with a header row.
/// Formatting is shortest-round-trip, so identical datasets produce
/// byte-identical files.
void write_dataset_csv(const std::string& path, const Dataset& ds);

}  // namespace karnet

#endif

// karnet: dataset generation, single-pass training, decision-surface export
// and benchmark runs for KAR-space feedforward networks.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "karnet/data.hpp"
#include "karnet/errors.hpp"
#include "karnet/eval.hpp"
#include "karnet/linalg.hpp"
#include "karnet/network.hpp"
#include "karnet/rng.hpp"
#include "karnet/textio.hpp"
#include "karnet/trainer.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 2;
constexpr int kIo = 3;
constexpr int kNumeric = 4;

int run_args(const std::vector<std::string>& args);

int exit_code_for(const karnet::Error& e) {
    if (dynamic_cast<const karnet::DomainViolation*>(&e) ||
        dynamic_cast<const karnet::NonFiniteInput*>(&e) ||
        dynamic_cast<const karnet::NonFiniteIntermediate*>(&e))
        return kNumeric;
    if (dynamic_cast<const karnet::IoError*>(&e) || dynamic_cast<const karnet::ParseError*>(&e) ||
        dynamic_cast<const karnet::UnknownCategory*>(&e) ||
        dynamic_cast<const karnet::UnknownLabel*>(&e))
        return kIo;
    return kUsage;
}

// --- manifests -------------------------------------------------------------
//
// A manifest is key-value text. The arg.N lines reproduce the exact argument
// vector (so `karnet rerun` replays the command bit-for-bit); the param.*
// lines echo the effective configuration for human readers. No timestamps,
// so a rerun rewrites every output byte-identically, manifest included.

using ParamList = std::vector<std::pair<std::string, std::string>>;

void write_manifest(const std::string& path, const std::vector<std::string>& args,
                    const ParamList& params) {
    std::ostringstream out;
    out << "schema = karnet-manifest-v1\n";
    out << "argc = " << args.size() << "\n";
    for (std::size_t i = 0; i < args.size(); ++i) out << "arg." << i << " = " << args[i] << "\n";
    for (const auto& [k, v] : params) out << "param." << k << " = " << v << "\n";
    karnet::atomic_write_text(path, out.str());
}

std::vector<std::string> manifest_args(const std::string& path) {
    const std::string text = karnet::read_text_file(path);
    std::istringstream in(text);
    std::string line;
    std::size_t argc = 0;
    bool saw_schema = false;
    std::vector<std::pair<std::size_t, std::string>> indexed;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t sep = line.find(" = ");
        if (sep == std::string::npos)
            throw karnet::ParseError(lineno, 1, "manifest line is not 'key = value'");
        const std::string key = line.substr(0, sep);
        const std::string value = line.substr(sep + 3);
        if (key == "schema") {
            if (value != "karnet-manifest-v1")
                throw karnet::ParseError(lineno, 1, "unknown manifest schema '" + value + "'");
            saw_schema = true;
        } else if (key == "argc") {
            argc = static_cast<std::size_t>(std::stoull(value));
        } else if (key.rfind("arg.", 0) == 0) {
            indexed.emplace_back(std::stoull(key.substr(4)), value);
        }
    }
    if (!saw_schema) throw karnet::ParseError(1, 1, "missing 'schema = karnet-manifest-v1' line");
    std::vector<std::string> args(argc);
    std::vector<bool> seen(argc, false);
    for (const auto& [i, v] : indexed) {
        if (i >= argc) throw karnet::ParseError(1, 1, "arg index " + std::to_string(i) +
                                                          " out of range");
        args[i] = v;
        seen[i] = true;
    }
    for (std::size_t i = 0; i < argc; ++i)
        if (!seen[i]) throw karnet::ParseError(1, 1, "manifest missing arg." + std::to_string(i));
    return args;
}

// --- shared option bundles ---------------------------------------------------

struct TrainFlags {
    std::uint64_t seed = 0;
    std::string init = "normal";
    double init_scale = 1.0;
    std::string pinv = "svd";
    double rcond = -1.0;  // negative means library default
    double lambda = 1e-8;
    bool no_clip = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "Master RNG seed")->capture_default_str();
        cmd->add_option("--init", init, "Random init for the sans-bias blocks")
            ->check(CLI::IsMember({"normal", "uniform"}))
            ->capture_default_str();
        cmd->add_option("--init-scale", init_scale, "Init scale (normal: scale/sqrt(fan_in))")
            ->capture_default_str();
        cmd->add_option("--pinv", pinv, "Pseudo-inverse mode")
            ->check(CLI::IsMember({"svd", "ridge"}))
            ->capture_default_str();
        cmd->add_option("--rcond", rcond,
                        "Relative singular value cutoff (default eps*max(rows,cols))");
        cmd->add_option("--lambda", lambda, "Ridge regularizer for --pinv ridge")
            ->capture_default_str();
        cmd->add_flag("--no-clip", no_clip,
                      "Fail on out-of-range inverse activations instead of clipping");
    }

    karnet::TrainConfig to_config() const {
        karnet::TrainConfig tc;
        tc.seed = seed;
        tc.init = init == "uniform" ? karnet::TrainConfig::Init::uniform_pm1
                                    : karnet::TrainConfig::Init::normal_scaled;
        tc.init_scale = init_scale;
        tc.pinv.mode = pinv == "ridge" ? karnet::PinvConfig::Mode::ridge_limit
                                       : karnet::PinvConfig::Mode::svd_truncation;
        if (rcond >= 0.0) tc.pinv.rcond = rcond;
        tc.pinv.lambda = lambda;
        tc.inverse_clip = !no_clip;
        return tc;
    }

    void echo(ParamList& p) const {
        p.emplace_back("seed", std::to_string(seed));
        p.emplace_back("init", init);
        p.emplace_back("init_scale", karnet::format_double(init_scale));
        p.emplace_back("pinv", pinv);
        p.emplace_back("rcond", rcond >= 0.0 ? karnet::format_double(rcond) : "default");
        p.emplace_back("lambda", karnet::format_double(lambda));
        p.emplace_back("inverse_clip", no_clip ? "false" : "true");
    }
};

struct LoadFlags {
    std::string plan;
    std::string label = "last";
    bool categorical = false;
    std::string scaling = "raw";
    bool no_header = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--plan", plan, "Encoding plan file (overrides the flags below)");
        cmd->add_option("--label", label, "Label column position")
            ->check(CLI::IsMember({"first", "last", "none"}))
            ->capture_default_str();
        cmd->add_flag("--categorical", categorical,
                      "Treat the label as a class (one indicator column per class)");
        cmd->add_option("--scaling", scaling, "Numeric feature scaling without a plan")
            ->check(CLI::IsMember({"raw", "minmax"}))
            ->capture_default_str();
        cmd->add_flag("--no-header", no_header, "Input CSV has no header row");
    }
};

std::size_t count_fields(const std::string& path) {
    const std::string text = karnet::read_text_file(path);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
    }
    throw karnet::IoError("'" + path + "' contains no data");
}

karnet::Dataset load_for_cli(const std::string& data_path, const LoadFlags& o) {
    karnet::EncodingPlan plan;
    if (!o.plan.empty()) {
        plan = karnet::EncodingPlan::load(o.plan);
    } else {
        using LP = karnet::EncodingPlan::LabelPosition;
        const LP pos = o.label == "first" ? LP::first : o.label == "none" ? LP::none : LP::last;
        const std::size_t fields = count_fields(data_path);
        const std::size_t n_features = fields - (pos == LP::none ? 0 : 1);
        if (n_features == 0)
            throw karnet::InvalidArgument("'" + data_path + "' has no feature columns");
        plan = karnet::EncodingPlan::all_numeric(
            n_features, pos, !o.categorical,
            o.scaling == "minmax" ? karnet::EncodingPlan::NumericScaling::minmax
                                  : karnet::EncodingPlan::NumericScaling::raw);
        plan.has_header = !o.no_header;
    }
    return karnet::load_csv(data_path, plan);
}

// --- synth -------------------------------------------------------------------

int cmd_synth(const std::string& kind, const karnet::Dataset& ds, const std::string& out,
              const std::vector<std::string>& args, ParamList params) {
    karnet::write_dataset_csv(out, ds);
    params.emplace_back("rows", std::to_string(ds.samples()));
    params.emplace_back("features", std::to_string(ds.features()));
    write_manifest(out + ".manifest", args, params);
    std::cout << "wrote " << ds.samples() << " " << kind << " rows to " << out << "\n";
    return kOk;
}

// --- train ---------------------------------------------------------------------

/// Labels for a single numeric 0/1 target column, or nothing if the column
/// is not binary.
std::optional<std::vector<int>> binary_labels(const karnet::Matrix& y) {
    if (y.cols() != 1) return std::nullopt;
    std::vector<int> labels(y.rows());
    for (std::size_t r = 0; r < y.rows(); ++r) {
        if (y(r, 0) == 0.0)
            labels[r] = 0;
        else if (y(r, 0) == 1.0)
            labels[r] = 1;
        else
            return std::nullopt;
    }
    return labels;
}

int cmd_train(const std::string& data_path, const std::vector<std::size_t>& widths,
              const std::string& model_path, std::string report_path, const LoadFlags& load,
              const TrainFlags& tf, const std::vector<std::string>& args) {
    const karnet::Dataset ds = load_for_cli(data_path, load);
    if (ds.targets() == 0)
        throw karnet::InvalidArgument("training needs a label or target column; check --label");

    karnet::NetworkSpec spec;
    spec.input_dim = ds.features();
    spec.widths = widths;
    spec.validate();
    if (spec.output_dim() != ds.targets())
        throw karnet::InvalidArgument(
            "last width is " + std::to_string(spec.output_dim()) + " but the data has " +
            std::to_string(ds.targets()) + " target column(s)");

    const karnet::TrainConfig tc = tf.to_config();
    const karnet::TrainResult res = karnet::train(ds.x, ds.y, spec, tc);
    karnet::save_model(model_path, spec, res.weights);

    const karnet::Matrix scores = karnet::forward(spec, res.weights, karnet::augment(ds.x));
    const double train_mse = karnet::mse(scores, ds.y);
    std::optional<double> train_acc;
    if (ds.has_labels() && ds.targets() >= 2) {
        train_acc = karnet::accuracy(scores, ds.labels);
    } else if (auto bin = binary_labels(ds.y)) {
        train_acc = karnet::accuracy_threshold(scores, *bin);
    }

    std::ostringstream report;
    report << res.report.to_text();
    report << "train_mse = " << karnet::format_double(train_mse) << "\n";
    if (train_acc)
        report << "train_accuracy = " << karnet::format_double(*train_acc) << "\n";
    if (report_path.empty()) report_path = model_path + ".report.txt";
    karnet::atomic_write_text(report_path, report.str());

    ParamList params;
    params.emplace_back("data", data_path);
    {
        std::string w;
        for (std::size_t i = 0; i < widths.size(); ++i)
            w += (i ? "," : "") + std::to_string(widths[i]);
        params.emplace_back("layers", w);
    }
    params.emplace_back("model", model_path);
    params.emplace_back("report", report_path);
    tf.echo(params);
    write_manifest(model_path + ".manifest", args, params);

    std::cout << "trained " << spec.depth() << "-layer network on " << ds.samples()
              << " rows; pinv_calls = " << res.report.pinv_calls
              << ", train_mse = " << karnet::format_double(train_mse);
    if (train_acc) std::cout << ", train_accuracy = " << karnet::format_double(*train_acc) << "%";
    std::cout << "\nmodel: " << model_path << "\nreport: " << report_path << "\n";
    return kOk;
}

// --- surface ---------------------------------------------------------------------

int cmd_surface(const std::string& model_path, const std::string& out, double x_min, double x_max,
                double y_min, double y_max, std::size_t resolution,
                const std::vector<std::string>& args) {
    const auto [spec, weights] = karnet::load_model(model_path);
    if (spec.input_dim != 2)
        throw karnet::DimensionMismatch("surface export needs a 2-input model; this one has " +
                                        std::to_string(spec.input_dim) + " inputs");
    if (resolution < 2) throw karnet::InvalidArgument("--resolution must be >= 2");
    if (!(x_min < x_max) || !(y_min < y_max))
        throw karnet::InvalidArgument("surface ranges need min < max");

    // Inclusive grid: both endpoints appear exactly once per axis.
    const std::size_t m = resolution * resolution;
    karnet::Matrix grid(m, 2, 0.0);
    std::size_t row = 0;
    for (std::size_t j = 0; j < resolution; ++j) {
        const double y = y_min + (y_max - y_min) * static_cast<double>(j) /
                                     static_cast<double>(resolution - 1);
        for (std::size_t i = 0; i < resolution; ++i, ++row) {
            grid(row, 0) = x_min + (x_max - x_min) * static_cast<double>(i) /
                                       static_cast<double>(resolution - 1);
            grid(row, 1) = y;
        }
    }

    const karnet::Matrix scores = karnet::forward(spec, weights, karnet::augment(grid));
    std::ostringstream body;
    body << "x,y";
    for (std::size_t c = 0; c < scores.cols(); ++c) body << ",out" << (c + 1);
    body << ",class\n";
    for (std::size_t r = 0; r < m; ++r) {
        body << karnet::format_double(grid(r, 0)) << "," << karnet::format_double(grid(r, 1));
        std::size_t best = 0;
        for (std::size_t c = 0; c < scores.cols(); ++c) {
            body << "," << karnet::format_double(scores(r, c));
            if (scores(r, c) > scores(r, best)) best = c;
        }
        if (scores.cols() == 1) best = scores(r, 0) >= 0.5 ? 1 : 0;
        body << "," << best << "\n";
    }
    karnet::atomic_write_text(out, body.str());

    ParamList params;
    params.emplace_back("model", model_path);
    params.emplace_back("out", out);
    params.emplace_back("x_min", karnet::format_double(x_min));
    params.emplace_back("x_max", karnet::format_double(x_max));
    params.emplace_back("y_min", karnet::format_double(y_min));
    params.emplace_back("y_max", karnet::format_double(y_max));
    params.emplace_back("resolution", std::to_string(resolution));
    write_manifest(out + ".manifest", args, params);

    std::cout << "wrote " << m << " grid rows to " << out << "\n";
    return kOk;
}

// --- bench ---------------------------------------------------------------------

struct ReferenceRow {
    const char* method;
    const char* nursery;
    const char* letter;
    const char* optdigit;
};

// Accuracy (%) reported in the literature under the same 10 trials of
// 10-fold cross-validation protocol; reported, not computed here.
constexpr ReferenceRow kReference[] = {
    {"RM", "90.93", "74.14", "95.32"},
    {"TERRP", "96.46", "88.20", "98.16"},
    {"TERRM", "91.69", "78.42", "96.81"},
    {"SVM-Poly", "91.61", "77.22", "95.52"},
    {"SVM-Rbf", "98.24", "97.14", "99.13"},
    {"FFnet-2layer", "98.89", "OM", "OM"},
    {"KARnet-2layer", "92.39", "88.99", "97.25"},
    {"KARnet-3layer", "92.64", "94.32", "97.17"},
    {"KARnet-4layer", "92.73", "94.12", "96.96"},
};

const char* reference_cell(const ReferenceRow& row, const std::string& dataset) {
    if (dataset == "nursery") return row.nursery;
    if (dataset == "letter") return row.letter;
    return row.optdigit;
}

std::string data_dir() {
    if (const char* env = std::getenv("KARNET_DATA_DIR")) return env;
    return "data/uci";
}

int cmd_bench(const std::string& dataset, std::string data_path, std::string data2_path,
              const std::string& out_prefix, std::size_t layers, std::size_t fixed_h,
              std::size_t folds, std::size_t trials, std::size_t inner_folds,
              const std::vector<std::size_t>& grid, bool reselect, const std::string& plan_path,
              const std::vector<std::string>& merge, const LoadFlags&, const TrainFlags& tf,
              const std::vector<std::string>& args) {
    const std::string dir = data_dir();
    if (data_path.empty()) {
        if (dataset == "nursery") data_path = dir + "/nursery.data";
        if (dataset == "letter") data_path = dir + "/letter-recognition.data";
        if (dataset == "optdigit") data_path = dir + "/optdigits.tra";
    }
    if (data2_path.empty() && dataset == "optdigit") data2_path = dir + "/optdigits.tes";

    const karnet::EncodingPlan plan = plan_path.empty()
                                          ? karnet::EncodingPlan::parse(
                                                karnet::builtin_plan_text(dataset))
                                          : karnet::EncodingPlan::load(plan_path);
    karnet::Dataset ds = karnet::load_csv(data_path, plan);
    if (!data2_path.empty()) ds = karnet::concat(ds, karnet::load_csv(data2_path, plan));
    if (!merge.empty()) ds = karnet::merge_class(ds, merge[0], merge[1]);

    karnet::CVConfig cfg;
    cfg.folds = folds;
    cfg.trials = trials;
    cfg.rule = karnet::rule_for_depth(layers);
    if (!grid.empty()) cfg.hidden_grid = grid;
    cfg.fixed_h = fixed_h;
    cfg.reselect_per_fold = reselect;
    cfg.inner_folds = inner_folds;
    cfg.seed = tf.seed;
    cfg.train = tf.to_config();

    karnet::CVReport report;
    try {
        report = karnet::cross_validate(ds, cfg);
    } catch (const karnet::ClassTooSmall& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (dataset == "nursery")
            std::cerr << "hint: rerun with --merge recommend very_recom to fold the two\n"
                         "      'recommend' rows into 'very_recom'\n";
        return kUsage;
    }

    std::ostringstream summary;
    summary << "dataset = " << dataset << "\n";
    summary << "data = " << data_path << "\n";
    if (!data2_path.empty()) summary << "data2 = " << data2_path << "\n";
    summary << "samples = " << ds.samples() << "\n";
    summary << "classes = " << ds.class_names.size() << "\n";
    summary << report.to_text();
    summary << "reference reported_accuracy (10 trials of 10-fold):\n";
    for (const ReferenceRow& row : kReference)
        summary << "  " << row.method << " = " << reference_cell(row, dataset) << "\n";
    const std::string karnet_row = "KARnet-" + std::to_string(layers) + "layer";
    for (const ReferenceRow& row : kReference)
        if (karnet_row == row.method) {
            const double reported = std::stod(reference_cell(row, dataset));
            const double diff = report.mean_accuracy - reported;
            summary << "difference vs " << row.method << " = " << (diff >= 0 ? "+" : "")
                    << karnet::format_double(diff) << "\n";
        }
    karnet::atomic_write_text(out_prefix + ".txt", summary.str());
    karnet::atomic_write_text(out_prefix + ".csv", report.to_csv());

    ParamList params;
    params.emplace_back("dataset", dataset);
    params.emplace_back("data", data_path);
    if (!data2_path.empty()) params.emplace_back("data2", data2_path);
    params.emplace_back("layers", std::to_string(layers));
    params.emplace_back("fixed_h", std::to_string(fixed_h));
    params.emplace_back("chosen_h", std::to_string(report.chosen_h));
    params.emplace_back("folds", std::to_string(folds));
    params.emplace_back("trials", std::to_string(trials));
    tf.echo(params);
    write_manifest(out_prefix + ".manifest", args, params);

    std::cout << "bench " << dataset << ": mean_accuracy = "
              << karnet::format_double(report.mean_accuracy)
              << "%, std = " << karnet::format_double(report.std_accuracy) << " over "
              << report.runs.size() << " runs (h = " << report.chosen_h << ")\n"
              << "summary: " << out_prefix << ".txt\nruns: " << out_prefix << ".csv\n";
    return kOk;
}

// --- top-level dispatch ---------------------------------------------------------

int run_args(const std::vector<std::string>& args) {
    CLI::App app{"KAR-space feedforward networks: single-pass, gradient-free training"};
    app.name("karnet");
    app.require_subcommand(1);

    // synth
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset CSV");
    synth->require_subcommand(1);
    std::string sinc_out, xor_out, spiral_out;
    karnet::SincConfig sinc_cfg;
    karnet::SpiralConfig spiral_cfg;

    CLI::App* synth_sinc = synth->add_subcommand("sinc", "Damped sine with noisy replicas");
    synth_sinc->add_option("--out", sinc_out, "Output CSV path")->required();
    synth_sinc->add_option("--seed", sinc_cfg.seed, "RNG seed")->capture_default_str();
    synth_sinc->add_option("--noise-fraction", sinc_cfg.noise_fraction,
                           "Multiplicative noise amplitude")
        ->capture_default_str();
    synth_sinc->add_option("--replicas", sinc_cfg.noisy_replicas, "Noisy copies of the 8 points")
        ->capture_default_str();

    CLI::App* synth_xor = synth->add_subcommand("xor", "The four XOR points");
    synth_xor->add_option("--out", xor_out, "Output CSV path")->required();

    CLI::App* synth_spiral = synth->add_subcommand("spiral", "Interleaved spiral arms");
    synth_spiral->add_option("--out", spiral_out, "Output CSV path")->required();
    synth_spiral->add_option("--seed", spiral_cfg.seed, "RNG seed")->capture_default_str();
    synth_spiral->add_option("--per-arm", spiral_cfg.points_per_arm, "Points per arm")
        ->capture_default_str();
    synth_spiral->add_option("--arms", spiral_cfg.arms, "Number of arms")->capture_default_str();
    synth_spiral->add_option("--noise-std", spiral_cfg.noise_std, "Coordinate noise std dev")
        ->capture_default_str();
    synth_spiral->add_option("--turns", spiral_cfg.turns, "Revolutions per arm")
        ->capture_default_str();
    synth_spiral->add_option("--r-max", spiral_cfg.r_max, "Outer radius")->capture_default_str();

    // train
    CLI::App* train_cmd = app.add_subcommand("train", "Train a network in one pass");
    std::string train_data, train_model, train_report;
    std::vector<std::size_t> train_widths;
    LoadFlags train_load;
    TrainFlags train_tf;
    train_cmd->add_option("--data", train_data, "Input CSV")->required();
    train_cmd->add_option("--layers", train_widths,
                          "Layer widths h1,...,q (input dim comes from the data)")
        ->required()
        ->delimiter(',');
    train_cmd->add_option("--model", train_model, "Output model file")->required();
    train_cmd->add_option("--report", train_report,
                          "Training report path (default <model>.report.txt)");
    train_load.attach(train_cmd);
    train_tf.attach(train_cmd);

    // surface
    CLI::App* surface = app.add_subcommand("surface", "Export a decision surface grid CSV");
    std::string surf_model, surf_out;
    double x_min = 0.0, x_max = 1.0, y_min = 0.0, y_max = 1.0;
    std::size_t resolution = 101;
    surface->add_option("--model", surf_model, "Trained 2-input model")->required();
    surface->add_option("--out", surf_out, "Output CSV path")->required();
    surface->add_option("--x-min", x_min, "Grid x minimum")->capture_default_str();
    surface->add_option("--x-max", x_max, "Grid x maximum")->capture_default_str();
    surface->add_option("--y-min", y_min, "Grid y minimum")->capture_default_str();
    surface->add_option("--y-max", y_max, "Grid y maximum")->capture_default_str();
    surface->add_option("--resolution", resolution, "Points per axis (inclusive ends)")
        ->capture_default_str();

    // bench
    CLI::App* bench = app.add_subcommand("bench", "Cross-validated benchmark run");
    std::string bench_dataset, bench_data, bench_data2, bench_prefix, bench_plan;
    std::size_t bench_layers = 2, bench_fixed_h = 0, bench_folds = 10, bench_trials = 1,
                bench_inner = 10;
    std::vector<std::size_t> bench_grid;
    std::vector<std::string> bench_merge;
    bool bench_reselect = false;
    LoadFlags bench_load;
    TrainFlags bench_tf;
    bench->add_option("dataset", bench_dataset, "Benchmark dataset")
        ->required()
        ->check(CLI::IsMember({"nursery", "letter", "optdigit"}));
    bench->add_option("--data", bench_data,
                      "Dataset file (default $KARNET_DATA_DIR or data/uci)");
    bench->add_option("--data2", bench_data2, "Second file pooled in (optdigit test half)");
    bench->add_option("--out", bench_prefix, "Output prefix (.csv/.txt/.manifest)")->required();
    bench->add_option("--layers", bench_layers, "Network depth: 2, 3 or 4")
        ->check(CLI::IsMember({2, 3, 4}))
        ->capture_default_str();
    bench->add_option("--fixed-h", bench_fixed_h, "Base hidden width (0 = grid search)")
        ->capture_default_str();
    bench->add_option("--folds", bench_folds, "Cross-validation folds")->capture_default_str();
    bench->add_option("--trials", bench_trials, "Protocol repetitions")->capture_default_str();
    bench->add_option("--inner-folds", bench_inner, "Model-selection folds")
        ->capture_default_str();
    bench->add_option("--grid", bench_grid, "Hidden-width search grid")->delimiter(',');
    bench->add_flag("--reselect-per-fold", bench_reselect,
                    "Redo the width search inside every fold");
    bench->add_option("--plan", bench_plan, "Encoding plan file (default: built-in)");
    bench->add_option("--merge", bench_merge, "Merge class FROM into TO before splitting")
        ->expected(2);
    bench_tf.attach(bench);

    // rerun
    CLI::App* rerun = app.add_subcommand("rerun", "Replay a command from its manifest");
    std::string rerun_manifest;
    rerun->add_option("manifest", rerun_manifest, "Manifest written by a previous run")
        ->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (synth->parsed()) {
            if (synth_sinc->parsed()) {
                ParamList p{{"kind", "sinc"},
                            {"seed", std::to_string(sinc_cfg.seed)},
                            {"noise_fraction", karnet::format_double(sinc_cfg.noise_fraction)},
                            {"replicas", std::to_string(sinc_cfg.noisy_replicas)}};
                return cmd_synth("sinc", karnet::gen_sinc(sinc_cfg), sinc_out, args, p);
            }
            if (synth_xor->parsed())
                return cmd_synth("xor", karnet::gen_xor(), xor_out, args, {{"kind", "xor"}});
            ParamList p{{"kind", "spiral"},
                        {"seed", std::to_string(spiral_cfg.seed)},
                        {"per_arm", std::to_string(spiral_cfg.points_per_arm)},
                        {"arms", std::to_string(spiral_cfg.arms)},
                        {"noise_std", karnet::format_double(spiral_cfg.noise_std)},
                        {"turns", karnet::format_double(spiral_cfg.turns)},
                        {"r_max", karnet::format_double(spiral_cfg.r_max)}};
            return cmd_synth("spiral", karnet::gen_spiral(spiral_cfg), spiral_out, args, p);
        }
        if (train_cmd->parsed())
            return cmd_train(train_data, train_widths, train_model, train_report, train_load,
                             train_tf, args);
        if (surface->parsed())
            return cmd_surface(surf_model, surf_out, x_min, x_max, y_min, y_max, resolution,
                               args);
        if (bench->parsed())
            return cmd_bench(bench_dataset, bench_data, bench_data2, bench_prefix, bench_layers,
                             bench_fixed_h, bench_folds, bench_trials, bench_inner, bench_grid,
                             bench_reselect, bench_plan, bench_merge, bench_load, bench_tf, args);
        if (rerun->parsed()) {
            const std::vector<std::string> replay = manifest_args(rerun_manifest);
            if (replay.empty() || replay[0] == "rerun")
                throw karnet::InvalidArgument("manifest does not describe a replayable command");
            return run_args(replay);
        }
    } catch (const karnet::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 1 ? argc - 1 : 0));
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run_args(args);
}

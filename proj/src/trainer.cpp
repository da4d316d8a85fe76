#include "karnet/trainer.hpp"

#include <chrono>
#include <random>
#include <sstream>

#include "karnet/activation.hpp"
#include "karnet/errors.hpp"

namespace karnet {

void TrainConfig::validate() const {
    if (!(init_scale > 0.0)) throw InvalidArgument("TrainConfig: init_scale must be > 0");
    pinv.validate();
}

namespace {

Matrix ones_column(std::size_t m) { return Matrix(m, 1, 1.0); }

const char* init_name_of(TrainConfig::Init init) {
    return init == TrainConfig::Init::normal_scaled ? "normal_scaled" : "uniform_pm1";
}

const char* pinv_mode_of(const PinvConfig& cfg) {
    return cfg.mode == PinvConfig::Mode::svd_truncation ? "svd_truncation" : "ridge_limit";
}

// Re-raise activation domain errors with the layer they occurred in so a
// failed run names the culprit.
template <typename Fn>
Matrix at_layer(std::size_t layer, Fn&& fn) {
    try {
        return fn();
    } catch (const DomainViolation& e) {
        throw DomainViolation(e.offending,
                              "layer " + std::to_string(layer) + ": " + e.what());
    }
}

}  // namespace

WeightStack init_weights(const NetworkSpec& spec, const TrainConfig& cfg) {
    spec.validate();
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    WeightStack w;
    w.layers.reserve(spec.depth());
    std::size_t in = spec.input_dim;
    for (std::size_t k = 0; k < spec.depth(); ++k) {
        const std::size_t fan_in = in + 1;
        Matrix layer(fan_in, spec.widths[k]);
        if (cfg.init == TrainConfig::Init::normal_scaled) {
            std::normal_distribution<double> dist(0.0, cfg.init_scale /
                                                           std::sqrt(static_cast<double>(fan_in)));
            for (std::size_t i = 0; i < layer.size(); ++i) layer.data()[i] = dist(rng);
        } else {
            std::uniform_real_distribution<double> dist(-cfg.init_scale, cfg.init_scale);
            for (std::size_t i = 0; i < layer.size(); ++i) layer.data()[i] = dist(rng);
        }
        w.layers.push_back(std::move(layer));
        in = spec.widths[k];
    }
    return w;
}

PeeledTargets peel_targets(const Matrix& y, const NetworkSpec& spec, const WeightStack& w,
                           const TrainConfig& cfg, std::size_t* clip_events) {
    cfg.validate();
    w.validate_for(spec);
    if (y.cols() != spec.output_dim())
        throw ShapeMismatch("peel_targets: Y has " + std::to_string(y.cols()) +
                            " columns, spec output dim is " +
                            std::to_string(spec.output_dim()));
    if (!y.all_finite()) throw NonFiniteInput("peel_targets: Y contains NaN or Inf");

    const std::size_t n = spec.depth();
    PeeledTargets targets;
    targets.g.resize(n);
    targets.g[n - 1] = y;
    // G_{k-1} = [f_k^-1(G_k) - 1 w_k^T] Wk+, walking k = n..2.
    for (std::size_t k = n; k >= 2; --k) {
        const Matrix& wk = w.layers[k - 1];
        Matrix t = at_layer(k, [&] {
            return act_inv(spec.activation_at(k - 1), targets.g[k - 1], cfg.inverse_clip,
                           clip_events);
        });
        t = t - ones_column(t.rows()) * bias_row(wk);
        targets.g[k - 2] = t * pinv(sans_bias(wk), cfg.pinv);
        if (!targets.g[k - 2].all_finite())
            throw NonFiniteIntermediate(k - 1, "peel_targets: non-finite target for layer " +
                                                   std::to_string(k - 1));
    }
    return targets;
}

WeightStack back_substitute(const AugmentedBatch& x, const Matrix& y, const PeeledTargets& g,
                            const NetworkSpec& spec, const TrainConfig& cfg,
                            TrainReport* report) {
    cfg.validate();
    spec.validate();
    const std::size_t n = spec.depth();
    if (g.g.size() != n)
        throw ShapeMismatch("back_substitute: expected " + std::to_string(n) +
                            " peeled targets, got " + std::to_string(g.g.size()));
    if (g.g[n - 1].rows() != y.rows() || g.g[n - 1].cols() != y.cols())
        throw ShapeMismatch("back_substitute: last peeled target must be Y");

    WeightStack w;
    w.layers.reserve(n);
    Matrix a = x.matrix();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t* clips = report ? &report->clip_events : nullptr;
        const Matrix t = at_layer(k + 1, [&] {
            return act_inv(spec.activation_at(k), g.g[k], cfg.inverse_clip, clips);
        });
        Matrix wk = solve_min_norm(a, t, cfg.pinv);
        if (report) report->layer_residuals.push_back(std::sqrt(sse(a, wk, t)));
        if (k + 1 < n) {
            Matrix z = a * wk;
            if (!z.all_finite())
                throw NonFiniteIntermediate(k + 1,
                                            "back_substitute: non-finite pre-activation at layer " +
                                                std::to_string(k + 1));
            a = augment(act(spec.activation_at(k), z), /*force=*/true).matrix();
        }
        w.layers.push_back(std::move(wk));
    }
    return w;
}

TrainResult train(const Matrix& x_raw, const Matrix& y, const NetworkSpec& spec,
                  const TrainConfig& cfg) {
    spec.validate();
    cfg.validate();
    if (x_raw.rows() != y.rows())
        throw ShapeMismatch("train: X has " + std::to_string(x_raw.rows()) +
                            " rows but Y has " + std::to_string(y.rows()));
    if (x_raw.cols() != spec.input_dim)
        throw ShapeMismatch("train: X has " + std::to_string(x_raw.cols()) +
                            " features, spec expects " + std::to_string(spec.input_dim));

    TrainReport report;
    report.seed = cfg.seed;
    report.init_name = init_name_of(cfg.init);
    report.init_scale = cfg.init_scale;
    report.inverse_clip = cfg.inverse_clip;
    report.pinv_mode = pinv_mode_of(cfg.pinv);

    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t calls0 = pinv_call_count();

    const AugmentedBatch x = augment(x_raw);
    const WeightStack initial = init_weights(spec, cfg);
    const PeeledTargets targets = peel_targets(y, spec, initial, cfg, &report.clip_events);
    WeightStack w = back_substitute(x, y, targets, spec, cfg, &report);

    report.pinv_calls = pinv_call_count() - calls0;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(w), std::move(report)};
}

std::string TrainReport::to_text() const {
    std::ostringstream os;
    os << "seed = " << seed << '\n'
       << "init = " << init_name << '\n'
       << "init_scale = " << init_scale << '\n'
       << "inverse_clip = " << (inverse_clip ? "true" : "false") << '\n'
       << "pinv_mode = " << pinv_mode << '\n'
       << "bias_rows_from_init = true\n"
       << "layers = " << layer_residuals.size() << '\n'
       << "clip_events = " << clip_events << '\n'
       << "pinv_calls = " << pinv_calls << '\n';
    for (std::size_t k = 0; k < layer_residuals.size(); ++k)
        os << "residual_" << (k + 1) << " = " << layer_residuals[k] << '\n';
    os << "wall_seconds = " << wall_seconds << '\n';
    return os.str();
}

}  // namespace karnet

#ifndef KARNET_TRAINER_HPP
#define KARNET_TRAINER_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "karnet/linalg.hpp"
#include "karnet/matrix.hpp"
#include "karnet/network.hpp"

namespace karnet {

/// Configuration of the single-pass trainer.
///
/// Weights are drawn from a seed-deterministic std::mt19937_64 stream, layer
/// by layer and row-major within each layer. normal_scaled draws
/// N(0, (init_scale / sqrt(fan_in))^2) where fan_in counts the layer's input
/// rows including the bias row; uniform_pm1 draws U(-init_scale, init_scale).
struct TrainConfig {
    enum class Init { normal_scaled, uniform_pm1 };

    std::uint64_t seed = 0;
    Init init = Init::normal_scaled;
    double init_scale = 1.0;
    PinvConfig pinv{};

    /// Clip inverse-activation inputs into the valid range instead of
    /// failing. Targets peeled through random weights routinely leave the
    /// activation range, so the trainer clips (and counts) by default; turn
    /// off to surface DomainViolation at its source.
    bool inverse_clip = true;

    void validate() const;
};

/// Per-layer target activations derived from Y by walking the network
/// backwards: g[n-1] = Y and g[k-1] = [f_k^-1(g[k]) - 1 w_k^T] Wk+, using the
/// bias row w_k and the sans-bias block Wk of the randomly initialized stack.
struct PeeledTargets {
    std::vector<Matrix> g;  // g[k] is the m x h_{k+1} target of layer k+1
};

/// Diagnostics for one training run, serializable as key = value text.
struct TrainReport {
    std::uint64_t seed = 0;
    std::string init_name;
    double init_scale = 1.0;
    bool inverse_clip = true;
    std::string pinv_mode;
    std::size_t clip_events = 0;            // inverse-domain clips across the run
    std::vector<double> layer_residuals;    // ||A_{k-1} W_k - f_k^-1(G_k)||_F
    std::uint64_t pinv_calls = 0;
    double wall_seconds = 0.0;

    std::string to_text() const;
};

/// Draw a full random stack for the given structure. The first layer is
/// overwritten by training and exists only so the stack is always complete;
/// bias rows are drawn from the same distribution as the rest because the
/// backward peel consumes them.
WeightStack init_weights(const NetworkSpec& spec, const TrainConfig& cfg);

/// Backward sweep (n-1 pseudo-inverse applications). clip_events, when given,
/// accumulates the number of inverse-domain clips.
PeeledTargets peel_targets(const Matrix& y, const NetworkSpec& spec, const WeightStack& w,
                           const TrainConfig& cfg, std::size_t* clip_events = nullptr);

/// Forward sweep (n pseudo-inverse applications): W_k = A_{k-1}+ f_k^-1(G_k)
/// with A_0 the augmented input and A_k = [1, f_k(A_{k-1} W_k)] realized from
/// the weights solved so far. Fills layer residuals and clip counts into
/// *report when given.
WeightStack back_substitute(const AugmentedBatch& x, const Matrix& y, const PeeledTargets& g,
                            const NetworkSpec& spec, const TrainConfig& cfg,
                            TrainReport* report = nullptr);

struct TrainResult {
    WeightStack weights;
    TrainReport report;
};

/// Full single-pass training: augment, random init, peel, back-substitute.
/// Exactly 2n-1 pseudo-inverse applications and no iteration of any kind.
TrainResult train(const Matrix& x_raw, const Matrix& y, const NetworkSpec& spec,
                  const TrainConfig& cfg);

}  // namespace karnet

#endif

#ifndef KARNET_NETWORK_HPP
#define KARNET_NETWORK_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "karnet/activation.hpp"
#include "karnet/matrix.hpp"

namespace karnet {

/// Fully connected feedforward structure: input dimension d and layer widths
/// h_1..h_n where h_n is the output dimension. Networks have at least two
/// layers. One activation is shared by all layers unless per-layer overrides
/// are set (layer_activations, when non-empty, must have one entry per layer).
struct NetworkSpec {
    std::size_t input_dim = 0;
    std::vector<std::size_t> widths;
    Activation activation{};
    std::vector<Activation> layer_activations;

    std::size_t depth() const { return widths.size(); }
    std::size_t output_dim() const { return widths.back(); }

    /// Activation of layer k, 0-based.
    const Activation& activation_at(std::size_t k) const {
        return layer_activations.empty() ? activation : layer_activations[k];
    }

    void validate() const;
};

/// Sample batch with the leading all-ones bias column, m x (d+1).
class AugmentedBatch {
public:
    explicit AugmentedBatch(Matrix m);

    const Matrix& matrix() const { return m_; }
    std::size_t samples() const { return m_.rows(); }

private:
    Matrix m_;
};

/// Prepend the bias column of ones to a raw m x d batch.
///
/// Refuses input whose first column is already all ones (a likely double
/// augmentation) unless force is set.
AugmentedBatch augment(const Matrix& x_raw, bool force = false);

/// Trained (or initialized) per-layer weights: W_1 is (d+1) x h_1 and W_k is
/// (h_{k-1}+1) x h_k. The first row of each W_k is the bias row.
struct WeightStack {
    std::vector<Matrix> layers;

    void validate_for(const NetworkSpec& spec) const;
};

Matrix bias_row(const Matrix& w);
Matrix sans_bias(const Matrix& w);

/// Deterministic full forward pass; returns the m x q output matrix.
Matrix forward(const NetworkSpec& spec, const WeightStack& w, const AugmentedBatch& x);

/// The augmented hidden outputs A_1..A_{n-1}, each m x (h_k+1).
std::vector<Matrix> hidden_activations(const NetworkSpec& spec, const WeightStack& w,
                                       const AugmentedBatch& x);

/// Two-layer sizing rule: the layer feeding the output has m x (h_1+1) shape,
/// so the output solve is under-determined exactly when h_1 + 1 >= m.
bool two_layer_underdetermined(std::size_t samples, std::size_t hidden_width);

/// Model persistence: versioned little-endian binary file holding the
/// NetworkSpec and each weight matrix as a row-major block of 64-bit floats.
/// Re-saving the same model produces byte-identical files.
void save_model(const std::string& path, const NetworkSpec& spec, const WeightStack& w);
std::pair<NetworkSpec, WeightStack> load_model(const std::string& path);

}  // namespace karnet

#endif

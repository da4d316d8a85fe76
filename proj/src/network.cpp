#include "karnet/network.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "karnet/errors.hpp"

namespace karnet {

void NetworkSpec::validate() const {
    if (input_dim < 1) throw InvalidArgument("NetworkSpec: input_dim must be >= 1");
    if (widths.size() < 2)
        throw InvalidArgument("NetworkSpec: at least two layers required");
    for (std::size_t h : widths)
        if (h < 1) throw InvalidArgument("NetworkSpec: every layer width must be >= 1");
    if (!layer_activations.empty() && layer_activations.size() != widths.size())
        throw InvalidArgument("NetworkSpec: need one activation per layer");
    activation.validate();
    for (const auto& a : layer_activations) a.validate();
}

AugmentedBatch::AugmentedBatch(Matrix m) : m_(std::move(m)) {
    if (m_.rows() == 0 || m_.cols() < 2)
        throw DegenerateShape("AugmentedBatch: need at least one sample and one feature");
    for (std::size_t i = 0; i < m_.rows(); ++i)
        if (m_(i, 0) != 1.0)
            throw InvalidArgument("AugmentedBatch: first column must be all ones");
}

AugmentedBatch augment(const Matrix& x_raw, bool force) {
    if (x_raw.rows() == 0 || x_raw.cols() == 0)
        throw DegenerateShape("augment: empty input");
    if (!x_raw.all_finite()) throw NonFiniteInput("augment: non-finite input");
    if (!force) {
        bool already = true;
        for (std::size_t i = 0; i < x_raw.rows() && already; ++i)
            already = x_raw(i, 0) == 1.0;
        if (already)
            throw InvalidArgument(
                "augment: first column is already all ones; pass force to augment anyway");
    }
    Matrix out(x_raw.rows(), x_raw.cols() + 1);
    for (std::size_t i = 0; i < x_raw.rows(); ++i) {
        out(i, 0) = 1.0;
        for (std::size_t j = 0; j < x_raw.cols(); ++j) out(i, j + 1) = x_raw(i, j);
    }
    return AugmentedBatch(std::move(out));
}

void WeightStack::validate_for(const NetworkSpec& spec) const {
    spec.validate();
    if (layers.size() != spec.depth())
        throw ShapeMismatch("WeightStack: expected " + std::to_string(spec.depth()) +
                            " layers, got " + std::to_string(layers.size()));
    std::size_t in = spec.input_dim;
    for (std::size_t k = 0; k < layers.size(); ++k) {
        const Matrix& w = layers[k];
        if (w.rows() != in + 1 || w.cols() != spec.widths[k])
            throw ShapeMismatch("WeightStack: layer " + std::to_string(k + 1) +
                                " must be " + std::to_string(in + 1) + "x" +
                                std::to_string(spec.widths[k]) + ", got " +
                                std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
        if (!w.all_finite())
            throw NonFiniteInput("WeightStack: layer " + std::to_string(k + 1) +
                                 " contains NaN or Inf");
        in = spec.widths[k];
    }
}

Matrix bias_row(const Matrix& w) {
    if (w.rows() < 2) throw DegenerateShape("bias_row: weight matrix needs >= 2 rows");
    Matrix b(1, w.cols());
    for (std::size_t j = 0; j < w.cols(); ++j) b(0, j) = w(0, j);
    return b;
}

Matrix sans_bias(const Matrix& w) {
    if (w.rows() < 2) throw DegenerateShape("sans_bias: weight matrix needs >= 2 rows");
    Matrix s(w.rows() - 1, w.cols());
    for (std::size_t i = 1; i < w.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j) s(i - 1, j) = w(i, j);
    return s;
}

namespace {

Matrix prepend_ones(const Matrix& m) {
    Matrix out(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out(i, 0) = 1.0;
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j + 1) = m(i, j);
    }
    return out;
}

// Shared sweep for forward and hidden_activations.
Matrix run_layers(const NetworkSpec& spec, const WeightStack& w, const AugmentedBatch& x,
                  std::vector<Matrix>* keep_hidden) {
    w.validate_for(spec);
    if (x.matrix().cols() != spec.input_dim + 1)
        throw ShapeMismatch("forward: batch has " + std::to_string(x.matrix().cols() - 1) +
                            " features, spec expects " + std::to_string(spec.input_dim));
    const std::size_t n = spec.depth();
    Matrix a = x.matrix();
    for (std::size_t k = 0; k < n; ++k) {
        Matrix z = a * w.layers[k];
        if (!z.all_finite())
            throw NonFiniteIntermediate(k + 1, "forward: non-finite pre-activation at layer " +
                                                   std::to_string(k + 1));
        Matrix h = act(spec.activation_at(k), z);
        if (k + 1 == n) return h;
        a = prepend_ones(h);
        if (keep_hidden) keep_hidden->push_back(a);
    }
    throw InvalidArgument("forward: unreachable");
}

}  // namespace

Matrix forward(const NetworkSpec& spec, const WeightStack& w, const AugmentedBatch& x) {
    return run_layers(spec, w, x, nullptr);
}

std::vector<Matrix> hidden_activations(const NetworkSpec& spec, const WeightStack& w,
                                       const AugmentedBatch& x) {
    std::vector<Matrix> hidden;
    hidden.reserve(spec.depth() - 1);
    run_layers(spec, w, x, &hidden);
    return hidden;
}

bool two_layer_underdetermined(std::size_t samples, std::size_t hidden_width) {
    return hidden_width + 1 >= samples;
}

// --- persistence -------------------------------------------------------------
//
// Layout (little-endian):
//   magic "KARNETM1"            8 bytes
//   u32 version (= 1)
//   u64 input_dim, u64 n_layers
//   u64 widths[n_layers]
//   per layer: u32 activation kind, f64 shift, f64 clip_epsilon
//   per layer: u64 rows, u64 cols, f64 data[rows*cols] row-major

namespace {

constexpr char kMagic[8] = {'K', 'A', 'R', 'N', 'E', 'T', 'M', '1'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("model file truncated");
    return v;
}

}  // namespace

void save_model(const std::string& path, const NetworkSpec& spec, const WeightStack& w) {
    w.validate_for(spec);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open " + tmp + " for writing");
        os.write(kMagic, sizeof(kMagic));
        write_pod<std::uint32_t>(os, 1);
        write_pod<std::uint64_t>(os, spec.input_dim);
        write_pod<std::uint64_t>(os, spec.depth());
        for (std::size_t h : spec.widths) write_pod<std::uint64_t>(os, h);
        for (std::size_t k = 0; k < spec.depth(); ++k) {
            const Activation& a = spec.activation_at(k);
            write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(a.kind));
            write_pod<double>(os, a.shift);
            write_pod<double>(os, a.clip_epsilon);
        }
        for (const Matrix& m : w.layers) {
            write_pod<std::uint64_t>(os, m.rows());
            write_pod<std::uint64_t>(os, m.cols());
            os.write(reinterpret_cast<const char*>(m.data()),
                     static_cast<std::streamsize>(m.size() * sizeof(double)));
        }
        if (!os) throw IoError("failed writing " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

std::pair<NetworkSpec, WeightStack> load_model(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open model file " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError(path + " is not a model file");
    const auto version = read_pod<std::uint32_t>(is);
    if (version != 1)
        throw IoError("unsupported model file version " + std::to_string(version));

    NetworkSpec spec;
    spec.input_dim = static_cast<std::size_t>(read_pod<std::uint64_t>(is));
    const auto n = static_cast<std::size_t>(read_pod<std::uint64_t>(is));
    spec.widths.resize(n);
    for (auto& h : spec.widths) h = static_cast<std::size_t>(read_pod<std::uint64_t>(is));
    spec.layer_activations.resize(n);
    for (auto& a : spec.layer_activations) {
        a.kind = static_cast<Activation::Kind>(read_pod<std::uint32_t>(is));
        a.shift = read_pod<double>(is);
        a.clip_epsilon = read_pod<double>(is);
    }
    if (!spec.layer_activations.empty()) spec.activation = spec.layer_activations.front();

    WeightStack w;
    w.layers.resize(n);
    for (auto& m : w.layers) {
        const auto rows = static_cast<std::size_t>(read_pod<std::uint64_t>(is));
        const auto cols = static_cast<std::size_t>(read_pod<std::uint64_t>(is));
        m = Matrix(rows, cols);
        is.read(reinterpret_cast<char*>(m.data()),
                static_cast<std::streamsize>(m.size() * sizeof(double)));
        if (!is) throw IoError("model file truncated: " + path);
    }
    w.validate_for(spec);
    return {std::move(spec), std::move(w)};
}

}  // namespace karnet

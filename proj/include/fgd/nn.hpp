#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace fgd::nn {

class TrainingDivergedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CorruptWeightsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidStateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense 4-D tensor, (batch, channels, height, width), row-major.
struct Tensor4 {
    int n = 0, c = 0, h = 0, w = 0;
    std::vector<double> v;

    Tensor4() = default;
    Tensor4(int n_, int c_, int h_, int w_);
    Tensor4(int n_, int c_, int h_, int w_, std::vector<double> data);

    std::size_t size() const { return v.size(); }
    double& at(int in, int ic, int iy, int ix) {
        return v[((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix];
    }
    double at(int in, int ic, int iy, int ix) const {
        return v[((static_cast<std::size_t>(in) * c + ic) * h + iy) * w + ix];
    }
    bool same_shape(const Tensor4& o) const {
        return n == o.n && c == o.c && h == o.h && w == o.w;
    }
};

/// Deterministic splitmix64 stream; uniform() yields doubles in [0,1).
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next();
    double uniform();
    double uniform(double lo, double hi);
    int below(int n);  // uniform integer in [0, n)
};

enum class LayerKind : std::uint32_t {
    conv2d = 1,    // 3x3, stride 1 or 2, zero-padded same
    relu = 2,
    maxpool2 = 3,  // 2x2, stride 2
    upsample2 = 4, // nearest, x2
    dense = 5,
    sigmoid = 6,
    concat_skip = 7,  // channel concat of previous output with an earlier one
};

struct Layer {
    LayerKind kind;
    Tensor4 weight;             // conv: (oc, ic, kh, kw); dense: (out, in, 1, 1)
    std::vector<double> bias;   // conv/dense
    int stride = 1;             // conv only
    int skip_from = -1;         // concat_skip: earlier layer index, -1 = network input
};

/// Sequential layer stack with optional concat-skip edges; parameters in f64.
class Network {
public:
    std::vector<Layer> layers;

    // Builder helpers; conv and dense use He-uniform init from the given stream.
    Network& conv(int in_ch, int out_ch, int stride, Rng& rng);
    Network& relu();
    Network& maxpool();
    Network& upsample();
    Network& dense(int in_dim, int out_dim, Rng& rng);
    Network& sigmoid();
    Network& concat(int skip_from);

    std::size_t param_count() const;
    std::uint64_t version() const { return version_; }
    void bump_version() { ++version_; }

private:
    std::uint64_t version_ = 0;
};

struct ForwardCache {
    Tensor4 input;
    std::vector<Tensor4> acts;              // one output per layer
    std::vector<std::vector<int>> argmax;   // per layer; used by maxpool
    std::uint64_t version = 0;
    const Network* net = nullptr;
};

/// Deterministic forward pass; fills the cache when given so backward can run.
Tensor4 forward(const Network& net, const Tensor4& x, ForwardCache* cache = nullptr);

struct Gradients {
    std::vector<Tensor4> weight;             // aligned with net.layers
    std::vector<std::vector<double>> bias;
    Tensor4 input;
};

/// Analytic gradients of every parameter and of the input, given dL/d(output).
Gradients backward(const Network& net, const ForwardCache& cache, const Tensor4& grad_out);

struct AdamState {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long long step = 0;
    std::vector<Tensor4> m_w, v_w;
    std::vector<std::vector<double>> m_b, v_b;

    AdamState(const Network& net, double lr_);
};

/// Standard Adam update with bias correction; throws on non-finite gradients.
void adam_step(AdamState& state, Network& net, const Gradients& grads);

// Little-endian binary: magic "FGDN", version u32, layer count u32, then per
// layer (kind u32, dim count u32, dims u32[], params f64[]).
void save_weights(const Network& net, const std::filesystem::path& path);
Network load_weights(const std::filesystem::path& path);

}  // namespace fgd::nn

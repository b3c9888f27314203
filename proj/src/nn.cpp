#include "fgd/nn.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

namespace fgd::nn {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

constexpr std::uint32_t kWeightFileVersion = 1;
constexpr char kMagic[4] = {'F', 'G', 'D', 'N'};

}  // namespace

Tensor4::Tensor4(int n_, int c_, int h_, int w_) : n(n_), c(c_), h(h_), w(w_) {
    require(n > 0 && c > 0 && h > 0 && w > 0, "tensor dims must be positive");
    v.assign(static_cast<std::size_t>(n) * c * h * w, 0.0);
}

Tensor4::Tensor4(int n_, int c_, int h_, int w_, std::vector<double> data)
    : n(n_), c(c_), h(h_), w(w_), v(std::move(data)) {
    require(n > 0 && c > 0 && h > 0 && w > 0, "tensor dims must be positive");
    require(v.size() == static_cast<std::size_t>(n) * c * h * w,
            "tensor data length must match dims");
    for (double x : v) require(std::isfinite(x), "tensor values must be finite");
}

std::uint64_t Rng::next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

int Rng::below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

namespace {

void he_uniform_fill(Tensor4& weight, int fan_in, Rng& rng) {
    double limit = std::sqrt(6.0 / fan_in);
    for (double& w : weight.v) w = rng.uniform(-limit, limit);
}

}  // namespace

Network& Network::conv(int in_ch, int out_ch, int stride, Rng& rng) {
    require(in_ch > 0 && out_ch > 0, "conv channel counts must be positive");
    require(stride == 1 || stride == 2, "conv stride must be 1 or 2");
    Layer l;
    l.kind = LayerKind::conv2d;
    l.weight = Tensor4(out_ch, in_ch, 3, 3);
    he_uniform_fill(l.weight, in_ch * 9, rng);
    l.bias.assign(out_ch, 0.0);
    l.stride = stride;
    layers.push_back(std::move(l));
    return *this;
}

Network& Network::relu() {
    layers.push_back({LayerKind::relu});
    return *this;
}

Network& Network::maxpool() {
    layers.push_back({LayerKind::maxpool2});
    return *this;
}

Network& Network::upsample() {
    layers.push_back({LayerKind::upsample2});
    return *this;
}

Network& Network::dense(int in_dim, int out_dim, Rng& rng) {
    require(in_dim > 0 && out_dim > 0, "dense dims must be positive");
    Layer l;
    l.kind = LayerKind::dense;
    l.weight = Tensor4(out_dim, in_dim, 1, 1);
    he_uniform_fill(l.weight, in_dim, rng);
    l.bias.assign(out_dim, 0.0);
    layers.push_back(std::move(l));
    return *this;
}

Network& Network::sigmoid() {
    layers.push_back({LayerKind::sigmoid});
    return *this;
}

Network& Network::concat(int skip_from) {
    require(skip_from >= -1 && skip_from < static_cast<int>(layers.size()),
            "concat skip source must be an earlier layer or -1 for the input");
    Layer l;
    l.kind = LayerKind::concat_skip;
    l.skip_from = skip_from;
    layers.push_back(std::move(l));
    return *this;
}

std::size_t Network::param_count() const {
    std::size_t total = 0;
    for (const Layer& l : layers) total += l.weight.size() + l.bias.size();
    return total;
}

namespace {

Tensor4 conv_forward(const Layer& l, const Tensor4& x) {
    const Tensor4& W = l.weight;
    require(x.c == W.c, "conv input channels mismatch");
    const int s = l.stride;
    const int kh = W.h, kw = W.w;
    const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
    const int oh = (x.h + s - 1) / s, ow = (x.w + s - 1) / s;
    Tensor4 out(x.n, W.n, oh, ow);
    for (int n = 0; n < x.n; ++n) {
        for (int oc = 0; oc < W.n; ++oc) {
            const double b = l.bias[oc];
            for (int oy = 0; oy < oh; ++oy) {
                for (int ox = 0; ox < ow; ++ox) {
                    double acc = b;
                    for (int ic = 0; ic < x.c; ++ic) {
                        for (int ky = 0; ky < kh; ++ky) {
                            int iy = oy * s + ky - ph;
                            if (iy < 0 || iy >= x.h) continue;
                            const double* xrow = &x.v[((static_cast<std::size_t>(n) * x.c + ic) * x.h + iy) * x.w];
                            const double* wrow = &W.v[((static_cast<std::size_t>(oc) * W.c + ic) * kh + ky) * kw];
                            for (int kx = 0; kx < kw; ++kx) {
                                int ix = ox * s + kx - pw;
                                if (ix < 0 || ix >= x.w) continue;
                                acc += wrow[kx] * xrow[ix];
                            }
                        }
                    }
                    out.at(n, oc, oy, ox) = acc;
                }
            }
        }
    }
    return out;
}

void conv_backward(const Layer& l, const Tensor4& x, const Tensor4& g, Tensor4& dW,
                   std::vector<double>& db, Tensor4& dx) {
    const Tensor4& W = l.weight;
    const int s = l.stride;
    const int kh = W.h, kw = W.w;
    const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
    for (int n = 0; n < x.n; ++n) {
        for (int oc = 0; oc < W.n; ++oc) {
            for (int oy = 0; oy < g.h; ++oy) {
                for (int ox = 0; ox < g.w; ++ox) {
                    const double gv = g.at(n, oc, oy, ox);
                    if (gv == 0.0) continue;
                    db[oc] += gv;
                    for (int ic = 0; ic < x.c; ++ic) {
                        for (int ky = 0; ky < kh; ++ky) {
                            int iy = oy * s + ky - ph;
                            if (iy < 0 || iy >= x.h) continue;
                            const double* xrow = &x.v[((static_cast<std::size_t>(n) * x.c + ic) * x.h + iy) * x.w];
                            double* dxrow = &dx.v[((static_cast<std::size_t>(n) * x.c + ic) * x.h + iy) * x.w];
                            double* dwrow = &dW.v[((static_cast<std::size_t>(oc) * W.c + ic) * kh + ky) * kw];
                            const double* wrow = &W.v[((static_cast<std::size_t>(oc) * W.c + ic) * kh + ky) * kw];
                            for (int kx = 0; kx < kw; ++kx) {
                                int ix = ox * s + kx - pw;
                                if (ix < 0 || ix >= x.w) continue;
                                dwrow[kx] += gv * xrow[ix];
                                dxrow[ix] += gv * wrow[kx];
                            }
                        }
                    }
                }
            }
        }
    }
}

Tensor4 dense_forward(const Layer& l, const Tensor4& x) {
    const Tensor4& W = l.weight;
    const int in_dim = W.c, out_dim = W.n;
    require(x.c * x.h * x.w == in_dim, "dense input size mismatch");
    Tensor4 out(x.n, out_dim, 1, 1);
    for (int n = 0; n < x.n; ++n) {
        const double* xv = &x.v[static_cast<std::size_t>(n) * in_dim];
        for (int o = 0; o < out_dim; ++o) {
            const double* wrow = &W.v[static_cast<std::size_t>(o) * in_dim];
            double acc = l.bias[o];
            for (int i = 0; i < in_dim; ++i) acc += wrow[i] * xv[i];
            out.at(n, o, 0, 0) = acc;
        }
    }
    return out;
}

void dense_backward(const Layer& l, const Tensor4& x, const Tensor4& g, Tensor4& dW,
                    std::vector<double>& db, Tensor4& dx) {
    const Tensor4& W = l.weight;
    const int in_dim = W.c, out_dim = W.n;
    for (int n = 0; n < x.n; ++n) {
        const double* xv = &x.v[static_cast<std::size_t>(n) * in_dim];
        double* dxv = &dx.v[static_cast<std::size_t>(n) * in_dim];
        for (int o = 0; o < out_dim; ++o) {
            const double gv = g.at(n, o, 0, 0);
            if (gv == 0.0) continue;
            db[o] += gv;
            double* dwrow = &dW.v[static_cast<std::size_t>(o) * in_dim];
            const double* wrow = &W.v[static_cast<std::size_t>(o) * in_dim];
            for (int i = 0; i < in_dim; ++i) {
                dwrow[i] += gv * xv[i];
                dxv[i] += gv * wrow[i];
            }
        }
    }
}

Tensor4 maxpool_forward(const Tensor4& x, std::vector<int>* argmax) {
    require(x.h % 2 == 0 && x.w % 2 == 0, "maxpool needs even spatial dims");
    Tensor4 out(x.n, x.c, x.h / 2, x.w / 2);
    if (argmax) argmax->assign(out.size(), 0);
    std::size_t oi = 0;
    for (int n = 0; n < x.n; ++n) {
        for (int c = 0; c < x.c; ++c) {
            for (int oy = 0; oy < out.h; ++oy) {
                for (int ox = 0; ox < out.w; ++ox, ++oi) {
                    double best = -1e308;
                    int best_idx = 0;
                    for (int dy = 0; dy < 2; ++dy) {
                        for (int dx = 0; dx < 2; ++dx) {
                            int iy = oy * 2 + dy, ix = ox * 2 + dx;
                            std::size_t idx = ((static_cast<std::size_t>(n) * x.c + c) * x.h + iy) * x.w + ix;
                            if (x.v[idx] > best) {  // ties keep the first in raster order
                                best = x.v[idx];
                                best_idx = static_cast<int>(idx);
                            }
                        }
                    }
                    out.v[oi] = best;
                    if (argmax) (*argmax)[oi] = best_idx;
                }
            }
        }
    }
    return out;
}

Tensor4 upsample_forward(const Tensor4& x) {
    Tensor4 out(x.n, x.c, x.h * 2, x.w * 2);
    for (int n = 0; n < x.n; ++n)
        for (int c = 0; c < x.c; ++c)
            for (int y = 0; y < out.h; ++y)
                for (int x2 = 0; x2 < out.w; ++x2)
                    out.at(n, c, y, x2) = x.at(n, c, y / 2, x2 / 2);
    return out;
}

const Tensor4& concat_source(const ForwardCache& cache, int skip_from) {
    return skip_from == -1 ? cache.input : cache.acts[skip_from];
}

}  // namespace

Tensor4 forward(const Network& net, const Tensor4& x, ForwardCache* cache) {
    require(!net.layers.empty(), "network has no layers");
    ForwardCache local;
    ForwardCache& c = cache ? *cache : local;
    c.input = x;
    c.acts.clear();
    c.acts.reserve(net.layers.size());
    c.argmax.assign(net.layers.size(), {});
    c.version = net.version();
    c.net = &net;

    const Tensor4* cur = &x;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const Layer& l = net.layers[i];
        Tensor4 out;
        switch (l.kind) {
            case LayerKind::conv2d:
                out = conv_forward(l, *cur);
                break;
            case LayerKind::relu: {
                out = *cur;
                for (double& v : out.v) v = v > 0.0 ? v : 0.0;
                break;
            }
            case LayerKind::maxpool2:
                out = maxpool_forward(*cur, &c.argmax[i]);
                break;
            case LayerKind::upsample2:
                out = upsample_forward(*cur);
                break;
            case LayerKind::dense:
                out = dense_forward(l, *cur);
                break;
            case LayerKind::sigmoid: {
                out = *cur;
                for (double& v : out.v) v = 1.0 / (1.0 + std::exp(-v));
                break;
            }
            case LayerKind::concat_skip: {
                const Tensor4& src = concat_source(c, l.skip_from);
                require(src.n == cur->n && src.h == cur->h && src.w == cur->w,
                        "concat sources must share batch and spatial dims");
                out = Tensor4(cur->n, cur->c + src.c, cur->h, cur->w);
                for (int n = 0; n < out.n; ++n) {
                    for (int ch = 0; ch < cur->c; ++ch)
                        for (int y = 0; y < out.h; ++y)
                            for (int xx = 0; xx < out.w; ++xx)
                                out.at(n, ch, y, xx) = cur->at(n, ch, y, xx);
                    for (int ch = 0; ch < src.c; ++ch)
                        for (int y = 0; y < out.h; ++y)
                            for (int xx = 0; xx < out.w; ++xx)
                                out.at(n, cur->c + ch, y, xx) = src.at(n, ch, y, xx);
                }
                break;
            }
        }
        c.acts.push_back(std::move(out));
        cur = &c.acts.back();
    }
    return c.acts.back();
}

Gradients backward(const Network& net, const ForwardCache& cache, const Tensor4& grad_out) {
    if (cache.net != &net || cache.version != net.version() ||
        cache.acts.size() != net.layers.size())
        throw InvalidStateError("forward cache is stale for this network");
    require(grad_out.same_shape(cache.acts.back()), "grad_out shape mismatch");

    Gradients g;
    g.weight.resize(net.layers.size());
    g.bias.resize(net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const Layer& l = net.layers[i];
        if (!l.weight.v.empty()) {
            g.weight[i] = l.weight;
            std::fill(g.weight[i].v.begin(), g.weight[i].v.end(), 0.0);
        }
        g.bias[i].assign(l.bias.size(), 0.0);
    }

    // One gradient buffer per layer output, accumulated because skip edges fan out.
    std::vector<Tensor4> buf(net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        buf[i] = cache.acts[i];
        std::fill(buf[i].v.begin(), buf[i].v.end(), 0.0);
    }
    Tensor4 input_grad = cache.input;
    std::fill(input_grad.v.begin(), input_grad.v.end(), 0.0);
    buf.back() = grad_out;

    auto add_to = [&](int idx, const Tensor4& t) {
        Tensor4& dst = idx == -1 ? input_grad : buf[idx];
        for (std::size_t k = 0; k < dst.v.size(); ++k) dst.v[k] += t.v[k];
    };

    for (int i = static_cast<int>(net.layers.size()) - 1; i >= 0; --i) {
        const Layer& l = net.layers[i];
        const Tensor4& in = i == 0 ? cache.input : cache.acts[i - 1];
        const Tensor4& gout = buf[i];
        Tensor4 gin = in;
        std::fill(gin.v.begin(), gin.v.end(), 0.0);

        switch (l.kind) {
            case LayerKind::conv2d:
                conv_backward(l, in, gout, g.weight[i], g.bias[i], gin);
                break;
            case LayerKind::relu:
                for (std::size_t k = 0; k < gin.v.size(); ++k)
                    gin.v[k] = in.v[k] > 0.0 ? gout.v[k] : 0.0;
                break;
            case LayerKind::maxpool2:
                for (std::size_t k = 0; k < gout.v.size(); ++k)
                    gin.v[cache.argmax[i][k]] += gout.v[k];
                break;
            case LayerKind::upsample2:
                for (int n = 0; n < gout.n; ++n)
                    for (int ch = 0; ch < gout.c; ++ch)
                        for (int y = 0; y < gout.h; ++y)
                            for (int xx = 0; xx < gout.w; ++xx)
                                gin.at(n, ch, y / 2, xx / 2) += gout.at(n, ch, y, xx);
                break;
            case LayerKind::dense:
                dense_backward(l, in, gout, g.weight[i], g.bias[i], gin);
                break;
            case LayerKind::sigmoid: {
                const Tensor4& out = cache.acts[i];
                for (std::size_t k = 0; k < gin.v.size(); ++k)
                    gin.v[k] = gout.v[k] * out.v[k] * (1.0 - out.v[k]);
                break;
            }
            case LayerKind::concat_skip: {
                const Tensor4& src = concat_source(cache, l.skip_from);
                Tensor4 gskip = src;
                std::fill(gskip.v.begin(), gskip.v.end(), 0.0);
                for (int n = 0; n < gout.n; ++n) {
                    for (int ch = 0; ch < in.c; ++ch)
                        for (int y = 0; y < gout.h; ++y)
                            for (int xx = 0; xx < gout.w; ++xx)
                                gin.at(n, ch, y, xx) = gout.at(n, ch, y, xx);
                    for (int ch = 0; ch < src.c; ++ch)
                        for (int y = 0; y < gout.h; ++y)
                            for (int xx = 0; xx < gout.w; ++xx)
                                gskip.at(n, ch, y, xx) = gout.at(n, in.c + ch, y, xx);
                }
                add_to(l.skip_from, gskip);
                break;
            }
        }
        add_to(i - 1, gin);
    }
    g.input = std::move(input_grad);
    return g;
}

AdamState::AdamState(const Network& net, double lr_) : lr(lr_) {
    require(lr > 0.0, "learning rate must be positive");
    m_w.resize(net.layers.size());
    v_w.resize(net.layers.size());
    m_b.resize(net.layers.size());
    v_b.resize(net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const Layer& l = net.layers[i];
        if (!l.weight.v.empty()) {
            m_w[i] = l.weight;
            std::fill(m_w[i].v.begin(), m_w[i].v.end(), 0.0);
            v_w[i] = m_w[i];
        }
        m_b[i].assign(l.bias.size(), 0.0);
        v_b[i].assign(l.bias.size(), 0.0);
    }
}

namespace {

void adam_update(double lr, double b1, double b2, double eps, double bc1, double bc2,
                 double g, double& m, double& v, double& p) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    p -= lr * (m / bc1) / (std::sqrt(v / bc2) + eps);
}

}  // namespace

void adam_step(AdamState& state, Network& net, const Gradients& grads) {
    require(grads.weight.size() == net.layers.size() && grads.bias.size() == net.layers.size(),
            "gradient layout does not match network");
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        require(grads.weight[i].size() == net.layers[i].weight.size() &&
                    grads.bias[i].size() == net.layers[i].bias.size(),
                "gradient shapes do not match parameters");
        for (double gv : grads.weight[i].v)
            if (!std::isfinite(gv)) throw TrainingDivergedError("non-finite weight gradient");
        for (double gv : grads.bias[i])
            if (!std::isfinite(gv)) throw TrainingDivergedError("non-finite bias gradient");
    }
    ++state.step;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        Layer& l = net.layers[i];
        for (std::size_t k = 0; k < l.weight.v.size(); ++k)
            adam_update(state.lr, state.beta1, state.beta2, state.eps, bc1, bc2,
                        grads.weight[i].v[k], state.m_w[i].v[k], state.v_w[i].v[k],
                        l.weight.v[k]);
        for (std::size_t k = 0; k < l.bias.size(); ++k)
            adam_update(state.lr, state.beta1, state.beta2, state.eps, bc1, bc2,
                        grads.bias[i][k], state.m_b[i][k], state.v_b[i][k], l.bias[k]);
    }
    net.bump_version();
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

void write_u32(std::FILE* f, std::uint32_t v) { std::fwrite(&v, sizeof v, 1, f); }

std::uint32_t read_u32(std::FILE* f) {
    std::uint32_t v = 0;
    if (std::fread(&v, sizeof v, 1, f) != 1) throw CorruptWeightsError("truncated weight file");
    return v;
}

// Serialized dims per kind; concat encodes skip_from + 1 so -1 (input) fits in u32.
std::vector<std::uint32_t> layer_dims(const Layer& l) {
    switch (l.kind) {
        case LayerKind::conv2d:
            return {static_cast<std::uint32_t>(l.weight.n), static_cast<std::uint32_t>(l.weight.c),
                    static_cast<std::uint32_t>(l.weight.h), static_cast<std::uint32_t>(l.weight.w),
                    static_cast<std::uint32_t>(l.stride)};
        case LayerKind::dense:
            return {static_cast<std::uint32_t>(l.weight.n), static_cast<std::uint32_t>(l.weight.c)};
        case LayerKind::concat_skip:
            return {static_cast<std::uint32_t>(l.skip_from + 1)};
        default:
            return {};
    }
}

}  // namespace

void save_weights(const Network& net, const std::filesystem::path& path) {
    if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot write " + path.string());
    std::FILE* f = fp.get();
    std::fwrite(kMagic, 1, 4, f);
    write_u32(f, kWeightFileVersion);
    write_u32(f, static_cast<std::uint32_t>(net.layers.size()));
    for (const Layer& l : net.layers) {
        write_u32(f, static_cast<std::uint32_t>(l.kind));
        auto dims = layer_dims(l);
        write_u32(f, static_cast<std::uint32_t>(dims.size()));
        for (auto d : dims) write_u32(f, d);
        if (!l.weight.v.empty())
            std::fwrite(l.weight.v.data(), sizeof(double), l.weight.v.size(), f);
        if (!l.bias.empty()) std::fwrite(l.bias.data(), sizeof(double), l.bias.size(), f);
    }
}

Network load_weights(const std::filesystem::path& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw CorruptWeightsError("cannot open " + path.string());
    std::FILE* f = fp.get();
    char magic[4];
    if (std::fread(magic, 1, 4, f) != 4 || std::memcmp(magic, kMagic, 4) != 0)
        throw CorruptWeightsError("bad magic in " + path.string());
    if (read_u32(f) != kWeightFileVersion)
        throw CorruptWeightsError("unsupported weight file version");
    std::uint32_t n_layers = read_u32(f);

    Network net;
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        std::uint32_t kind_tag = read_u32(f);
        std::uint32_t ndims = read_u32(f);
        std::vector<std::uint32_t> dims(ndims);
        for (auto& d : dims) d = read_u32(f);

        Layer l;
        l.kind = static_cast<LayerKind>(kind_tag);
        std::size_t n_params = 0;
        switch (l.kind) {
            case LayerKind::conv2d: {
                if (ndims != 5) throw CorruptWeightsError("conv layer needs 5 dims");
                if (dims[4] != 1 && dims[4] != 2) throw CorruptWeightsError("bad conv stride");
                l.weight = Tensor4(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
                                   static_cast<int>(dims[2]), static_cast<int>(dims[3]));
                l.bias.assign(dims[0], 0.0);
                l.stride = static_cast<int>(dims[4]);
                n_params = l.weight.size() + l.bias.size();
                break;
            }
            case LayerKind::dense: {
                if (ndims != 2) throw CorruptWeightsError("dense layer needs 2 dims");
                l.weight = Tensor4(static_cast<int>(dims[0]), static_cast<int>(dims[1]), 1, 1);
                l.bias.assign(dims[0], 0.0);
                n_params = l.weight.size() + l.bias.size();
                break;
            }
            case LayerKind::concat_skip: {
                if (ndims != 1) throw CorruptWeightsError("concat layer needs 1 dim");
                l.skip_from = static_cast<int>(dims[0]) - 1;
                if (l.skip_from < -1 || l.skip_from >= static_cast<int>(i))
                    throw CorruptWeightsError("concat skip source out of range");
                break;
            }
            case LayerKind::relu:
            case LayerKind::maxpool2:
            case LayerKind::upsample2:
            case LayerKind::sigmoid:
                if (ndims != 0) throw CorruptWeightsError("unexpected dims for stateless layer");
                break;
            default:
                throw CorruptWeightsError("unknown layer kind tag");
        }
        if (n_params) {
            std::vector<double> params(n_params);
            if (std::fread(params.data(), sizeof(double), n_params, f) != n_params)
                throw CorruptWeightsError("truncated weight file");
            for (double p : params)
                if (!std::isfinite(p)) throw CorruptWeightsError("non-finite parameter");
            std::copy(params.begin(), params.begin() + static_cast<long>(l.weight.size()),
                      l.weight.v.begin());
            std::copy(params.begin() + static_cast<long>(l.weight.size()), params.end(),
                      l.bias.begin());
        }
        net.layers.push_back(std::move(l));
    }
    if (std::fgetc(f) != EOF) throw CorruptWeightsError("trailing bytes in weight file");
    return net;
}

}  // namespace fgd::nn

#include "procache/neural.hpp"

#include <cmath>
#include <stdexcept>

#include "procache/rng.hpp"

namespace procache {

namespace {

double apply_act(Activation a, double z) {
    switch (a) {
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::identity: return z;
    }
    return z;
}

// derivative in terms of preactivation z; relu uses subgradient 0 at z == 0
double act_deriv(Activation a, double z) {
    switch (a) {
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::sigmoid: {
            const double s = 1.0 / (1.0 + std::exp(-z));
            return s * (1.0 - s);
        }
        case Activation::identity: return 1.0;
    }
    return 1.0;
}

}  // namespace

void MlpSpec::validate() const {
    if (input_dim < 1 || output_dim < 1)
        throw std::invalid_argument("MlpSpec: input_dim and output_dim must be >= 1");
    for (std::size_t d : hidden_dims)
        if (d < 1) throw std::invalid_argument("MlpSpec: hidden dims must be >= 1");
    if (hidden_activation != Activation::relu)
        throw std::invalid_argument("MlpSpec: hidden activation is fixed to relu");
}

std::size_t MlpSpec::param_count() const {
    std::size_t n = 0;
    std::size_t prev = input_dim;
    for (std::size_t d : hidden_dims) {
        n += (prev + 1) * d;
        prev = d;
    }
    n += (prev + 1) * output_dim;
    return n;
}

Mlp Mlp::init(const MlpSpec& spec) {
    spec.validate();
    Mlp net;
    net.spec_ = spec;
    Rng rng(spec.seed);

    std::vector<std::size_t> dims;
    dims.push_back(spec.input_dim);
    for (std::size_t d : spec.hidden_dims) dims.push_back(d);
    dims.push_back(spec.output_dim);

    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.in = dims[l];
        layer.out = dims[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
        layer.w.resize(layer.in * layer.out);
        for (double& w : layer.w) w = rng.uniform(-bound, bound);
        layer.b.assign(layer.out, 0.0);
        net.layers_.push_back(std::move(layer));
    }
    return net;
}

std::vector<double> Mlp::run_forward(std::span<const double> x,
                                     std::vector<std::vector<double>>* preacts,
                                     std::vector<std::vector<double>>* acts) const {
    if (x.size() != spec_.input_dim)
        throw std::invalid_argument("Mlp::forward: input dimension mismatch");

    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        const bool is_output = (l + 1 == layers_.size());
        const Activation act = is_output ? spec_.output_activation : spec_.hidden_activation;

        std::vector<double> z(layer.out);
        for (std::size_t o = 0; o < layer.out; ++o) {
            const double* wrow = layer.w.data() + o * layer.in;
            double s = layer.b[o];
            for (std::size_t i = 0; i < layer.in; ++i) s += wrow[i] * cur[i];
            z[o] = s;
        }
        std::vector<double> a(layer.out);
        for (std::size_t o = 0; o < layer.out; ++o) a[o] = apply_act(act, z[o]);

        if (acts) acts->push_back(cur);  // input to this layer
        if (preacts) preacts->push_back(std::move(z));
        cur = std::move(a);
    }
    return cur;
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
    return run_forward(x, nullptr, nullptr);
}

std::vector<double> Mlp::backward(std::span<const double> x,
                                  std::span<const double> upstream) const {
    return backward(x, upstream, {});
}

std::vector<double> Mlp::backward(std::span<const double> x, std::span<const double> upstream,
                                  std::span<const double> recovery_dir) const {
    if (upstream.size() != spec_.output_dim)
        throw std::invalid_argument("Mlp::backward: upstream dimension mismatch");
    if (!recovery_dir.empty() && recovery_dir.size() != spec_.output_dim)
        throw std::invalid_argument("Mlp::backward: recovery_dir dimension mismatch");

    std::vector<std::vector<double>> preacts;
    std::vector<std::vector<double>> inputs;  // input vector of each layer
    run_forward(x, &preacts, &inputs);

    std::vector<double> grad(param_count(), 0.0);

    // delta at the output layer
    const std::size_t L = layers_.size();
    std::vector<double> delta(layers_.back().out);
    for (std::size_t o = 0; o < delta.size(); ++o) {
        double d = act_deriv(spec_.output_activation, preacts[L - 1][o]);
        if (spec_.output_activation == Activation::relu && !recovery_dir.empty() && d == 0.0 &&
            recovery_dir[o] > 0.0)
            d = 1.0;  // open a saturated unit that the update wants to raise
        delta[o] = upstream[o] * d;
    }

    // parameter offsets per layer
    std::vector<std::size_t> offsets(L);
    std::size_t off = 0;
    for (std::size_t l = 0; l < L; ++l) {
        offsets[l] = off;
        off += layers_[l].w.size() + layers_[l].b.size();
    }

    for (std::size_t l = L; l-- > 0;) {
        const Layer& layer = layers_[l];
        double* gw = grad.data() + offsets[l];
        double* gb = gw + layer.w.size();
        const std::vector<double>& in = inputs[l];
        for (std::size_t o = 0; o < layer.out; ++o) {
            const double d = delta[o];
            double* grow = gw + o * layer.in;
            for (std::size_t i = 0; i < layer.in; ++i) grow[i] = d * in[i];
            gb[o] = d;
        }
        if (l > 0) {
            std::vector<double> prev(layer.in, 0.0);
            for (std::size_t o = 0; o < layer.out; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                const double* wrow = layer.w.data() + o * layer.in;
                for (std::size_t i = 0; i < layer.in; ++i) prev[i] += d * wrow[i];
            }
            for (std::size_t i = 0; i < layer.in; ++i)
                prev[i] *= act_deriv(spec_.hidden_activation, preacts[l - 1][i]);
            delta = std::move(prev);
        }
    }
    return grad;
}

void Mlp::sgd_step(std::span<const double> grad, const LrSchedule& schedule, std::size_t iter,
                   UpdateDirection direction) {
    if (grad.size() != param_count())
        throw std::invalid_argument("Mlp::sgd_step: gradient dimension mismatch");
    const double lr = schedule.at(iter);
    const double sign = direction == UpdateDirection::ascent ? 1.0 : -1.0;
    std::size_t k = 0;
    for (Layer& layer : layers_) {
        for (double& w : layer.w) w += sign * lr * grad[k++];
        for (double& b : layer.b) b += sign * lr * grad[k++];
    }
}

std::vector<double> Mlp::parameters() const {
    std::vector<double> out;
    out.reserve(param_count());
    for (const Layer& layer : layers_) {
        out.insert(out.end(), layer.w.begin(), layer.w.end());
        out.insert(out.end(), layer.b.begin(), layer.b.end());
    }
    return out;
}

void Mlp::set_parameters(std::span<const double> params) {
    if (params.size() != param_count())
        throw std::invalid_argument("Mlp::set_parameters: dimension mismatch");
    std::size_t k = 0;
    for (Layer& layer : layers_) {
        for (double& w : layer.w) w = params[k++];
        for (double& b : layer.b) b = params[k++];
    }
}

}  // namespace procache

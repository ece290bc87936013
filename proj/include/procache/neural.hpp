#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace procache {

enum class Activation { relu, sigmoid, identity };

struct MlpSpec {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden_dims;
    std::size_t output_dim = 1;
    Activation hidden_activation = Activation::relu;
    Activation output_activation = Activation::identity;
    std::uint64_t seed = 0;

    void validate() const;
    std::size_t param_count() const;
};

/// Learning rate base/(1 + decay*i) at iteration i.
struct LrSchedule {
    double base = 0.1;
    double decay = 0.001;

    double at(std::size_t iter) const {
        return base / (1.0 + decay * static_cast<double>(iter));
    }
};

enum class UpdateDirection { ascent, descent };

/// Fully-connected network with manual backpropagation. Plain value type:
/// copies are independent, forward is const and safe to call concurrently.
class Mlp {
public:
    /// Weights ~ U(-b, b) with b = sqrt(6/(d_in+d_out)), biases zero;
    /// deterministic per spec.seed.
    static Mlp init(const MlpSpec& spec);

    std::vector<double> forward(std::span<const double> x) const;

    /// Gradient of dot(upstream, output) w.r.t. every parameter, laid out
    /// layer-major, row-major weights then bias per layer (the same order as
    /// parameters()).
    std::vector<double> backward(std::span<const double> x,
                                 std::span<const double> upstream) const;

    /// Same, but a relu output unit whose preactivation is non-positive
    /// still passes gradient when the desired output change recovery_dir[i]
    /// is positive. This reproduces projected-update semantics for
    /// saturated non-negative outputs; it equals backward() whenever every
    /// output unit is active. No effect on sigmoid/identity outputs.
    std::vector<double> backward(std::span<const double> x, std::span<const double> upstream,
                                 std::span<const double> recovery_dir) const;

    /// theta <- theta +/- lr(iter) * grad
    void sgd_step(std::span<const double> grad, const LrSchedule& schedule, std::size_t iter,
                  UpdateDirection direction);

    std::size_t param_count() const { return spec_.param_count(); }
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> params);

    const MlpSpec& spec() const { return spec_; }

private:
    struct Layer {
        std::size_t in = 0, out = 0;
        std::vector<double> w;  // out x in, row-major
        std::vector<double> b;  // out
    };

    std::vector<double> run_forward(std::span<const double> x,
                                    std::vector<std::vector<double>>* preacts,
                                    std::vector<std::vector<double>>* acts) const;

    MlpSpec spec_;
    std::vector<Layer> layers_;
};

}  // namespace procache

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "procache/neural.hpp"
#include "procache/types.hpp"

namespace procache {

struct TrainOptions {
    std::size_t batch_size = 32;
    std::size_t epochs = 200;
    LrSchedule lr{};
    std::uint64_t seed = 0;

    void validate() const;
};

/// Four networks mapping a flattened history window to the bandwidth
/// factor, the caching vector and the two multiplier blocks. Hidden sizes
/// are fixed: q [300,200,100], beta [200], xi_c [200], xi_f [200,100];
/// sigmoid output for beta, relu outputs elsewhere.
struct ProactiveModel {
    Mlp beta_net;
    Mlp q_net;
    Mlp xi_c_net;
    Mlp xi_f_net;
    std::size_t num_files = 0;
    std::size_t window_tau = 0;

    static ProactiveModel init(std::size_t num_files, std::size_t window_tau,
                               std::uint64_t seed);
};

/// Lagrangian of the constrained problem:
/// sop - xi_c (sum q - C) - sum_f xi_f (q_f - 1). Inputs need not be
/// feasible; q entries must be >= 0 and beta in (0,1].
double lagrangian(const PopularityVector& p, const Policy& policy, const MultiplierSet& mult,
                  const NetworkConfig& cfg);

struct Decision {
    double raw_beta = 0.0;            // straight from the sigmoid head
    std::vector<double> raw_q;        // straight from the relu head, possibly infeasible
    double raw_xi_c = 0.0;            // multipliers, observability only
    std::vector<double> raw_xi_f;
    Policy projected;                 // clip q to [0,1], then scale if sum > C
};

/// Forward pass plus feasibility projection. The projection is the
/// identity whenever the raw outputs are already feasible.
Decision decide(const ProactiveModel& model, const HistoryWindow& h, const NetworkConfig& cfg);

/// Per-net parameter gradients of the batch-averaged Lagrangian, each in
/// the direction its Appendix update adds (ascent for beta/q nets, the
/// multiplier updates' own push direction for the xi nets).
struct BatchGradients {
    std::vector<double> beta_grad;
    std::vector<double> q_grad;
    std::vector<double> xi_c_grad;
    std::vector<double> xi_f_grad;
    double batch_lagrangian = 0.0;
};

BatchGradients batch_gradients(const ProactiveModel& model,
                               const std::vector<TrainingSample>& samples,
                               std::span<const std::size_t> indices, const NetworkConfig& cfg);

/// Applies one primal-dual step: all four blocks add lr(iter) times their
/// stored gradient (the xi gradients already point down the Lagrangian).
void apply_batch(ProactiveModel& model, const BatchGradients& grads, const LrSchedule& lr,
                 std::size_t iter);

/// Mean Lagrangian of the model's current outputs over a batch.
double batch_lagrangian(const ProactiveModel& model, const std::vector<TrainingSample>& samples,
                        std::span<const std::size_t> indices, const NetworkConfig& cfg);

/// Offline primal-dual training. Deterministic per (samples, cfg, opts).
/// Throws std::runtime_error naming the batch on a non-finite loss.
ProactiveModel train(const std::vector<TrainingSample>& samples, const NetworkConfig& cfg,
                     const TrainOptions& opts);

/// One |B| = 1 update at global iteration `iter`, for sliding-window online
/// adaptation.
void train_online_step(ProactiveModel& model, const TrainingSample& latest,
                       const NetworkConfig& cfg, const TrainOptions& opts, std::size_t iter);

/// Checkpoint: one JSON file bundling the four parameter blobs plus
/// (F, tau, config hash); versioned header.
void save_model(const ProactiveModel& model, const std::string& path,
                std::uint64_t config_hash);
ProactiveModel load_model(const std::string& path, std::uint64_t expected_config_hash = 0);

}  // namespace procache

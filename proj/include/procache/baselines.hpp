#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "procache/neural.hpp"
#include "procache/proactive.hpp"
#include "procache/solver.hpp"
#include "procache/types.hpp"

namespace procache {

/// Input is the flattened history (or the target popularity for the
/// known-future variant); the label is the static-solver optimum at the
/// sample's target popularity.
struct SupervisedSample {
    std::vector<double> input;
    double label_beta = 1.0;
    std::vector<double> label_q;
    bool solver_converged = true;
};

/// Solves the static problem at each sample's target popularity. Labels are
/// always feasible; per-sample convergence flags carry solver status.
std::vector<SupervisedSample> make_labels(const std::vector<TrainingSample>& samples,
                                          const NetworkConfig& cfg, const SolverOptions& opts,
                                          bool known_future_input = false);

struct SupervisedNets {
    Mlp beta_net;
    Mlp q_net;
};

/// MSE regression of (beta, q) heads onto the labels; architectures match
/// the proactive beta/q networks.
SupervisedNets train_supervised(const std::vector<SupervisedSample>& samples,
                                std::size_t num_files, const TrainOptions& opts);

Policy supervised_decide(const SupervisedNets& nets, std::span<const double> input,
                         const NetworkConfig& cfg);

/// Shared-across-files least squares on the tau-lag window, with intercept.
struct LinearPredictor {
    std::vector<double> coeffs;  // length tau, newest lag first
    double intercept = 0.0;
    bool fallback_persistence = false;  // degenerate fit: predict last period
};

LinearPredictor fit_linear_predictor(const std::vector<TrainingSample>& samples);

/// Per-file prediction clipped at 0 and renormalized to sum 1.
PopularityVector preopt_predict(const LinearPredictor& predictor, const HistoryWindow& h);

/// First-predict-then-optimize: static solve at the predicted popularity.
Policy preopt_decide(const LinearPredictor& predictor, const HistoryWindow& h,
                     const NetworkConfig& cfg, const SolverOptions& opts);

// Label cache (CSV: sample id, converged, beta, q...), so expensive label
// generation is resumable.
void save_labels_csv(const std::string& path, const std::vector<SupervisedSample>& labels);
bool load_labels_csv(const std::string& path, std::vector<SupervisedSample>& labels);

void save_supervised(const SupervisedNets& nets, const std::string& path,
                     std::uint64_t config_hash);
SupervisedNets load_supervised(const std::string& path, std::uint64_t expected_config_hash = 0);

void save_predictor(const LinearPredictor& p, const std::string& path);
LinearPredictor load_predictor(const std::string& path);

}  // namespace procache

#include "procache/proactive.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "procache/analytics.hpp"
#include "procache/rng.hpp"

namespace procache {

namespace {

using nlohmann::json;

std::vector<double> mean_of(std::vector<double> acc, std::size_t n) {
    const double inv = 1.0 / static_cast<double>(n);
    for (double& v : acc) v *= inv;
    return acc;
}

void add_into(std::vector<double>& acc, const std::vector<double>& g) {
    if (acc.empty())
        acc = g;
    else
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += g[i];
}

json net_to_json(const Mlp& net) {
    const MlpSpec& s = net.spec();
    json j;
    j["input_dim"] = s.input_dim;
    j["hidden_dims"] = s.hidden_dims;
    j["output_dim"] = s.output_dim;
    j["output_activation"] = s.output_activation == Activation::sigmoid
                                 ? "sigmoid"
                                 : (s.output_activation == Activation::relu ? "relu" : "identity");
    j["seed"] = s.seed;
    j["params"] = net.parameters();
    return j;
}

Mlp net_from_json(const json& j) {
    MlpSpec s;
    s.input_dim = j.at("input_dim").get<std::size_t>();
    s.hidden_dims = j.at("hidden_dims").get<std::vector<std::size_t>>();
    s.output_dim = j.at("output_dim").get<std::size_t>();
    const std::string act = j.at("output_activation").get<std::string>();
    s.output_activation = act == "sigmoid" ? Activation::sigmoid
                                           : (act == "relu" ? Activation::relu : Activation::identity);
    s.seed = j.at("seed").get<std::uint64_t>();
    Mlp net = Mlp::init(s);
    net.set_parameters(j.at("params").get<std::vector<double>>());
    return net;
}

}  // namespace

void TrainOptions::validate() const {
    if (batch_size < 1) throw std::invalid_argument("TrainOptions.batch_size: must be >= 1");
    if (!(lr.base > 0)) throw std::invalid_argument("TrainOptions.lr.base: must be > 0");
    if (!(lr.decay >= 0)) throw std::invalid_argument("TrainOptions.lr.decay: must be >= 0");
}

ProactiveModel ProactiveModel::init(std::size_t num_files, std::size_t window_tau,
                                    std::uint64_t seed) {
    if (num_files < 1 || window_tau < 1)
        throw std::invalid_argument("ProactiveModel::init: num_files and window_tau must be >= 1");
    const std::size_t in = num_files * window_tau;
    ProactiveModel m;
    m.num_files = num_files;
    m.window_tau = window_tau;
    m.beta_net = Mlp::init({in, {200}, 1, Activation::relu, Activation::sigmoid,
                            derive_seed(seed, 0)});
    m.q_net = Mlp::init({in, {300, 200, 100}, num_files, Activation::relu, Activation::relu,
                         derive_seed(seed, 1)});
    m.xi_c_net = Mlp::init({in, {200}, 1, Activation::relu, Activation::relu,
                            derive_seed(seed, 2)});
    m.xi_f_net = Mlp::init({in, {200, 100}, num_files, Activation::relu, Activation::relu,
                            derive_seed(seed, 3)});
    return m;
}

double lagrangian(const PopularityVector& p, const Policy& policy, const MultiplierSet& mult,
                  const NetworkConfig& cfg) {
    mult.validate();
    if (mult.xi_f.size() != policy.q.size())
        throw std::invalid_argument("lagrangian: xi_f and q dimensions disagree");
    double value = sop(p, policy, cfg);
    double qsum = 0.0;
    for (double v : policy.q) qsum += v;
    value -= mult.xi_c * (qsum - static_cast<double>(cfg.cache_size_c));
    for (std::size_t f = 0; f < policy.q.size(); ++f)
        value -= mult.xi_f[f] * (policy.q[f] - 1.0);
    return value;
}

Decision decide(const ProactiveModel& model, const HistoryWindow& h, const NetworkConfig& cfg) {
    h.validate();
    if (h.tau() != model.window_tau || h.num_files() != model.num_files)
        throw std::invalid_argument("decide: history dimensions do not match the model");

    const std::vector<double> x = h.flatten();
    Decision d;
    d.raw_beta = model.beta_net.forward(x)[0];
    d.raw_q = model.q_net.forward(x);
    d.raw_xi_c = model.xi_c_net.forward(x)[0];
    d.raw_xi_f = model.xi_f_net.forward(x);

    d.projected.beta = d.raw_beta;
    d.projected.q = d.raw_q;
    double sum = 0.0;
    for (double& v : d.projected.q) {
        v = std::min(std::max(v, 0.0), 1.0);
        sum += v;
    }
    const double cap = static_cast<double>(cfg.cache_size_c);
    if (sum > cap)
        for (double& v : d.projected.q) v *= cap / sum;
    return d;
}

BatchGradients batch_gradients(const ProactiveModel& model,
                               const std::vector<TrainingSample>& samples,
                               std::span<const std::size_t> indices, const NetworkConfig& cfg) {
    if (indices.empty()) throw std::invalid_argument("batch_gradients: empty batch");
    const double cap = static_cast<double>(cfg.cache_size_c);
    const std::size_t F = model.num_files;

    BatchGradients out;
    std::vector<double> upstream_q(F), viol_f(F);
    for (std::size_t idx : indices) {
        const TrainingSample& s = samples[idx];
        const std::vector<double> x = s.history.flatten();
        if (x.size() != model.num_files * model.window_tau)
            throw std::invalid_argument("batch_gradients: sample dimensions do not match model");

        const double bt = model.beta_net.forward(x)[0];
        const std::vector<double> qt = model.q_net.forward(x);
        const double xc = model.xi_c_net.forward(x)[0];
        const std::vector<double> xf = model.xi_f_net.forward(x);

        const SopTerms terms = compute_terms(cfg, bt);
        std::vector<double> gq(F);
        sop_grad_q_with_terms(s.target.probs, qt, bt, terms, cfg, gq);
        const double gb = sop_grad_beta_with_terms(s.target.probs, qt, bt, terms, cfg);

        double qsum = 0.0;
        for (std::size_t f = 0; f < F; ++f) {
            upstream_q[f] = gq[f] - xc - xf[f];
            viol_f[f] = qt[f] - 1.0;
            qsum += qt[f];
        }
        const double viol_c = qsum - cap;

        add_into(out.q_grad, model.q_net.backward(x, upstream_q, upstream_q));
        const double gb_arr[1] = {gb};
        add_into(out.beta_grad, model.beta_net.backward(x, std::span(gb_arr, 1)));
        const double vc_arr[1] = {viol_c};
        add_into(out.xi_c_grad, model.xi_c_net.backward(x, std::span(vc_arr, 1),
                                                        std::span(vc_arr, 1)));
        add_into(out.xi_f_grad, model.xi_f_net.backward(x, viol_f, viol_f));

        double l = sop_with_terms(s.target.probs, qt, bt, terms, cfg) - xc * viol_c;
        for (std::size_t f = 0; f < F; ++f) l -= xf[f] * viol_f[f];
        out.batch_lagrangian += l;
    }

    const std::size_t n = indices.size();
    out.q_grad = mean_of(std::move(out.q_grad), n);
    out.beta_grad = mean_of(std::move(out.beta_grad), n);
    out.xi_c_grad = mean_of(std::move(out.xi_c_grad), n);
    out.xi_f_grad = mean_of(std::move(out.xi_f_grad), n);
    out.batch_lagrangian /= static_cast<double>(n);
    return out;
}

void apply_batch(ProactiveModel& model, const BatchGradients& grads, const LrSchedule& lr,
                 std::size_t iter) {
    model.q_net.sgd_step(grads.q_grad, lr, iter, UpdateDirection::ascent);
    model.beta_net.sgd_step(grads.beta_grad, lr, iter, UpdateDirection::ascent);
    // the xi gradients already carry the violation sign, so adding them is
    // descent on the Lagrangian
    model.xi_c_net.sgd_step(grads.xi_c_grad, lr, iter, UpdateDirection::ascent);
    model.xi_f_net.sgd_step(grads.xi_f_grad, lr, iter, UpdateDirection::ascent);
}

double batch_lagrangian(const ProactiveModel& model, const std::vector<TrainingSample>& samples,
                        std::span<const std::size_t> indices, const NetworkConfig& cfg) {
    const double cap = static_cast<double>(cfg.cache_size_c);
    double total = 0.0;
    for (std::size_t idx : indices) {
        const TrainingSample& s = samples[idx];
        const std::vector<double> x = s.history.flatten();
        const double bt = model.beta_net.forward(x)[0];
        const std::vector<double> qt = model.q_net.forward(x);
        const double xc = model.xi_c_net.forward(x)[0];
        const std::vector<double> xf = model.xi_f_net.forward(x);
        const SopTerms terms = compute_terms(cfg, bt);

        double qsum = 0.0;
        for (double v : qt) qsum += v;
        double l = sop_with_terms(s.target.probs, qt, bt, terms, cfg) - xc * (qsum - cap);
        for (std::size_t f = 0; f < qt.size(); ++f) l -= xf[f] * (qt[f] - 1.0);
        total += l;
    }
    return total / static_cast<double>(indices.size());
}

ProactiveModel train(const std::vector<TrainingSample>& samples, const NetworkConfig& cfg,
                     const TrainOptions& opts) {
    if (samples.empty()) throw std::invalid_argument("train: need at least one sample");
    cfg.validate();
    opts.validate();
    for (const TrainingSample& s : samples) s.validate();
    const std::size_t F = samples.front().num_files();
    const std::size_t tau = samples.front().history.tau();
    for (const TrainingSample& s : samples)
        if (s.num_files() != F || s.history.tau() != tau)
            throw std::invalid_argument("train: samples are not dimensionally consistent");

    ProactiveModel model = ProactiveModel::init(F, tau, opts.seed);

    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::size_t iter = 0;
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        // seeded Fisher-Yates, reproducible across library implementations
        Rng rng(derive_seed(opts.seed, 0x5a5a5a5aULL + epoch));
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
            const std::size_t len = std::min(opts.batch_size, order.size() - start);
            BatchGradients g =
                batch_gradients(model, samples, std::span(order).subspan(start, len), cfg);
            if (!std::isfinite(g.batch_lagrangian))
                throw std::runtime_error("train: non-finite loss in batch " +
                                         std::to_string(start / opts.batch_size) + " of epoch " +
                                         std::to_string(epoch));
            apply_batch(model, g, opts.lr, iter);
            ++iter;
        }
    }
    return model;
}

void train_online_step(ProactiveModel& model, const TrainingSample& latest,
                       const NetworkConfig& cfg, const TrainOptions& opts, std::size_t iter) {
    latest.validate();
    const std::vector<TrainingSample> one{latest};
    const std::size_t idx[1] = {0};
    BatchGradients g = batch_gradients(model, one, std::span(idx, 1), cfg);
    if (!std::isfinite(g.batch_lagrangian))
        throw std::runtime_error("train_online_step: non-finite loss");
    apply_batch(model, g, opts.lr, iter);
}

void save_model(const ProactiveModel& model, const std::string& path,
                std::uint64_t config_hash) {
    json j;
    j["format"] = "procache-model";
    j["version"] = 1;
    j["num_files"] = model.num_files;
    j["window_tau"] = model.window_tau;
    j["config_hash"] = config_hash;
    j["nets"]["beta"] = net_to_json(model.beta_net);
    j["nets"]["q"] = net_to_json(model.q_net);
    j["nets"]["xi_c"] = net_to_json(model.xi_c_net);
    j["nets"]["xi_f"] = net_to_json(model.xi_f_net);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    out << j.dump(1) << "\n";
}

ProactiveModel load_model(const std::string& path, std::uint64_t expected_config_hash) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    json j;
    in >> j;
    if (j.value("format", "") != std::string("procache-model"))
        throw std::runtime_error("load_model: " + path + " is not a model checkpoint");
    if (j.value("version", 0) != 1)
        throw std::runtime_error("load_model: unsupported checkpoint version");
    if (expected_config_hash != 0 &&
        j.at("config_hash").get<std::uint64_t>() != expected_config_hash)
        throw std::runtime_error("load_model: checkpoint was trained under a different config");
    ProactiveModel m;
    m.num_files = j.at("num_files").get<std::size_t>();
    m.window_tau = j.at("window_tau").get<std::size_t>();
    m.beta_net = net_from_json(j.at("nets").at("beta"));
    m.q_net = net_from_json(j.at("nets").at("q"));
    m.xi_c_net = net_from_json(j.at("nets").at("xi_c"));
    m.xi_f_net = net_from_json(j.at("nets").at("xi_f"));
    return m;
}

}  // namespace procache

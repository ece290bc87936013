#include "procache/baselines.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "procache/log.hpp"
#include "procache/rng.hpp"

namespace procache {

namespace {

using nlohmann::json;

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Gaussian elimination with partial pivoting; returns false when singular.
bool solve_linear(std::vector<std::vector<double>> a, std::vector<double> b,
                  std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-12) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= m * a[col][c];
            b[r] -= m * b[col];
        }
    }
    x.assign(n, 0.0);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return true;
}

}  // namespace

std::vector<SupervisedSample> make_labels(const std::vector<TrainingSample>& samples,
                                          const NetworkConfig& cfg, const SolverOptions& opts,
                                          bool known_future_input) {
    std::vector<SupervisedSample> out;
    out.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const TrainingSample& s = samples[i];
        s.validate();
        SolverOptions per = opts;
        per.seed = derive_seed(opts.seed, i);
        const SolveResult res = solve_p0(s.target, cfg, per);
        SupervisedSample lab;
        lab.input = known_future_input ? s.target.probs : s.history.flatten();
        lab.label_beta = res.policy.beta;
        lab.label_q = res.policy.q;
        lab.solver_converged = res.converged;
        out.push_back(std::move(lab));
    }
    return out;
}

SupervisedNets train_supervised(const std::vector<SupervisedSample>& samples,
                                std::size_t num_files, const TrainOptions& opts) {
    if (samples.empty()) throw std::invalid_argument("train_supervised: need at least one sample");
    opts.validate();
    const std::size_t in_dim = samples.front().input.size();
    for (const SupervisedSample& s : samples)
        if (s.input.size() != in_dim || s.label_q.size() != num_files)
            throw std::invalid_argument("train_supervised: inconsistent sample dimensions");

    SupervisedNets nets;
    nets.beta_net = Mlp::init({in_dim, {200}, 1, Activation::relu, Activation::sigmoid,
                               derive_seed(opts.seed, 10)});
    nets.q_net = Mlp::init({in_dim, {300, 200, 100}, num_files, Activation::relu,
                            Activation::relu, derive_seed(opts.seed, 11)});

    std::vector<std::size_t> order(samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<double> up_q(num_files), rec_q(num_files);
    std::size_t iter = 0;
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        Rng rng(derive_seed(opts.seed, 0x7b7b7b7bULL + epoch));
        for (std::size_t i = order.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
            std::swap(order[i - 1], order[j]);
        }
        for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
            const std::size_t len = std::min(opts.batch_size, order.size() - start);
            std::vector<double> gq, gb;
            double loss = 0.0;
            for (std::size_t k = 0; k < len; ++k) {
                const SupervisedSample& s = samples[order[start + k]];
                const std::vector<double> q_out = nets.q_net.forward(s.input);
                const double b_out = nets.beta_net.forward(s.input)[0];
                for (std::size_t f = 0; f < num_files; ++f) {
                    const double d = q_out[f] - s.label_q[f];
                    // mean square error over components; descent handled by
                    // negating the upstream
                    up_q[f] = -2.0 * d / static_cast<double>(num_files);
                    rec_q[f] = up_q[f];
                    loss += d * d / static_cast<double>(num_files);
                }
                const double db = b_out - s.label_beta;
                loss += db * db;
                const double up_b[1] = {-2.0 * db};
                auto g1 = nets.q_net.backward(s.input, up_q, rec_q);
                auto g2 = nets.beta_net.backward(s.input, std::span(up_b, 1));
                if (gq.empty()) {
                    gq = std::move(g1);
                    gb = std::move(g2);
                } else {
                    for (std::size_t t = 0; t < gq.size(); ++t) gq[t] += g1[t];
                    for (std::size_t t = 0; t < gb.size(); ++t) gb[t] += g2[t];
                }
            }
            if (!std::isfinite(loss))
                throw std::runtime_error("train_supervised: non-finite loss in batch " +
                                         std::to_string(start / opts.batch_size) + " of epoch " +
                                         std::to_string(epoch));
            for (double& v : gq) v /= static_cast<double>(len);
            for (double& v : gb) v /= static_cast<double>(len);
            nets.q_net.sgd_step(gq, opts.lr, iter, UpdateDirection::ascent);
            nets.beta_net.sgd_step(gb, opts.lr, iter, UpdateDirection::ascent);
            ++iter;
        }
    }
    return nets;
}

Policy supervised_decide(const SupervisedNets& nets, std::span<const double> input,
                         const NetworkConfig& cfg) {
    Policy p;
    p.beta = nets.beta_net.forward(input)[0];
    p.q = nets.q_net.forward(input);
    double sum = 0.0;
    for (double& v : p.q) {
        v = std::min(std::max(v, 0.0), 1.0);
        sum += v;
    }
    const double cap = static_cast<double>(cfg.cache_size_c);
    if (sum > cap)
        for (double& v : p.q) v *= cap / sum;
    return p;
}

LinearPredictor fit_linear_predictor(const std::vector<TrainingSample>& samples) {
    if (samples.empty())
        throw std::invalid_argument("fit_linear_predictor: need at least one sample");
    const std::size_t tau = samples.front().history.tau();
    const std::size_t n = tau + 1;  // coefficients plus intercept

    // normal equations over every (file column -> target) pair
    std::vector<std::vector<double>> ata(n, std::vector<double>(n, 0.0));
    std::vector<double> atb(n, 0.0);
    std::vector<double> row(n, 1.0);  // row[tau] = 1 (intercept)
    for (const TrainingSample& s : samples) {
        for (std::size_t f = 0; f < s.num_files(); ++f) {
            for (std::size_t j = 0; j < tau; ++j) row[j] = s.history.rows[j][f];
            const double y = s.target.probs[f];
            for (std::size_t a = 0; a < n; ++a) {
                for (std::size_t b = 0; b < n; ++b) ata[a][b] += row[a] * row[b];
                atb[a] += row[a] * y;
            }
        }
    }

    LinearPredictor out;
    std::vector<double> x;
    if (solve_linear(ata, atb, x)) {
        out.coeffs.assign(x.begin(), x.begin() + tau);
        out.intercept = x[tau];
    } else {
        log_warn("fit_linear_predictor: degenerate design matrix, falling back to persistence");
        out.coeffs.assign(tau, 0.0);
        out.coeffs[0] = 1.0;
        out.intercept = 0.0;
        out.fallback_persistence = true;
    }
    return out;
}

PopularityVector preopt_predict(const LinearPredictor& predictor, const HistoryWindow& h) {
    h.validate();
    if (h.tau() != predictor.coeffs.size())
        throw std::invalid_argument("preopt_predict: window length does not match predictor");
    const std::size_t F = h.num_files();
    PopularityVector out;
    out.probs.resize(F);
    double sum = 0.0;
    for (std::size_t f = 0; f < F; ++f) {
        double v = predictor.intercept;
        for (std::size_t j = 0; j < h.tau(); ++j) v += predictor.coeffs[j] * h.rows[j][f];
        v = std::max(v, 0.0);
        out.probs[f] = v;
        sum += v;
    }
    if (sum <= 0.0) {
        log_warn("preopt_predict: all-zero prediction, substituting uniform");
        std::fill(out.probs.begin(), out.probs.end(), 1.0 / static_cast<double>(F));
    } else {
        for (double& v : out.probs) v /= sum;
    }
    return out;
}

Policy preopt_decide(const LinearPredictor& predictor, const HistoryWindow& h,
                     const NetworkConfig& cfg, const SolverOptions& opts) {
    const PopularityVector pred = preopt_predict(predictor, h);
    return solve_p0(pred, cfg, opts).policy;
}

void save_labels_csv(const std::string& path, const std::vector<SupervisedSample>& labels) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("save_labels_csv: cannot open " + path);
    f << "sample,converged,beta,q\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        f << i << "," << (labels[i].solver_converged ? 1 : 0) << ","
          << fmt_double(labels[i].label_beta);
        for (double v : labels[i].label_q) f << "," << fmt_double(v);
        f << "\n";
    }
}

bool load_labels_csv(const std::string& path, std::vector<SupervisedSample>& labels) {
    std::ifstream f(path);
    if (!f) return false;
    std::string line;
    if (!std::getline(f, line) || line != "sample,converged,beta,q") return false;
    std::size_t i = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        if (i >= labels.size()) return false;
        std::istringstream ss(line);
        std::string tok;
        std::getline(ss, tok, ',');  // sample id, positional
        if (!std::getline(ss, tok, ',')) return false;
        labels[i].solver_converged = tok == "1";
        if (!std::getline(ss, tok, ',')) return false;
        labels[i].label_beta = std::stod(tok);
        labels[i].label_q.clear();
        while (std::getline(ss, tok, ',')) labels[i].label_q.push_back(std::stod(tok));
        ++i;
    }
    return i == labels.size();
}

void save_supervised(const SupervisedNets& nets, const std::string& path,
                     std::uint64_t config_hash) {
    json j;
    j["format"] = "procache-supervised";
    j["version"] = 1;
    j["config_hash"] = config_hash;
    for (const auto& [name, net] : {std::pair<const char*, const Mlp*>{"beta", &nets.beta_net},
                                    {"q", &nets.q_net}}) {
        json nj;
        const MlpSpec& s = net->spec();
        nj["input_dim"] = s.input_dim;
        nj["hidden_dims"] = s.hidden_dims;
        nj["output_dim"] = s.output_dim;
        nj["output_activation"] =
            s.output_activation == Activation::sigmoid ? "sigmoid" : "relu";
        nj["seed"] = s.seed;
        nj["params"] = net->parameters();
        j["nets"][name] = std::move(nj);
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_supervised: cannot open " + path);
    out << j.dump(1) << "\n";
}

SupervisedNets load_supervised(const std::string& path, std::uint64_t expected_config_hash) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_supervised: cannot open " + path);
    json j;
    in >> j;
    if (j.value("format", "") != std::string("procache-supervised"))
        throw std::runtime_error("load_supervised: " + path + " is not a supervised checkpoint");
    if (expected_config_hash != 0 &&
        j.at("config_hash").get<std::uint64_t>() != expected_config_hash)
        throw std::runtime_error("load_supervised: checkpoint config hash mismatch");
    auto load_net = [&](const char* name) {
        const json& nj = j.at("nets").at(name);
        MlpSpec s;
        s.input_dim = nj.at("input_dim").get<std::size_t>();
        s.hidden_dims = nj.at("hidden_dims").get<std::vector<std::size_t>>();
        s.output_dim = nj.at("output_dim").get<std::size_t>();
        s.output_activation = nj.at("output_activation").get<std::string>() == "sigmoid"
                                  ? Activation::sigmoid
                                  : Activation::relu;
        s.seed = nj.at("seed").get<std::uint64_t>();
        Mlp net = Mlp::init(s);
        net.set_parameters(nj.at("params").get<std::vector<double>>());
        return net;
    };
    SupervisedNets nets;
    nets.beta_net = load_net("beta");
    nets.q_net = load_net("q");
    return nets;
}

void save_predictor(const LinearPredictor& p, const std::string& path) {
    json j;
    j["format"] = "procache-preopt";
    j["version"] = 1;
    j["coeffs"] = p.coeffs;
    j["intercept"] = p.intercept;
    j["fallback_persistence"] = p.fallback_persistence;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_predictor: cannot open " + path);
    out << j.dump(1) << "\n";
}

LinearPredictor load_predictor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_predictor: cannot open " + path);
    json j;
    in >> j;
    if (j.value("format", "") != std::string("procache-preopt"))
        throw std::runtime_error("load_predictor: " + path + " is not a predictor checkpoint");
    LinearPredictor p;
    p.coeffs = j.at("coeffs").get<std::vector<double>>();
    p.intercept = j.at("intercept").get<double>();
    p.fallback_persistence = j.value("fallback_persistence", false);
    return p;
}

}  // namespace procache

#include "procache/types.hpp"

#include <cmath>
#include <stdexcept>

namespace procache {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

bool finite_in_unit(double v, double tol) {
    return std::isfinite(v) && v >= -tol && v <= 1.0 + tol;
}

}  // namespace

void NetworkConfig::validate() const {
    require(std::isfinite(lambda_b) && lambda_b > 0, "NetworkConfig.lambda_b: must be > 0");
    require(std::isfinite(lambda_u) && lambda_u > 0, "NetworkConfig.lambda_u: must be > 0");
    require(std::isfinite(bandwidth_w) && bandwidth_w > 0, "NetworkConfig.bandwidth_w: must be > 0");
    require(std::isfinite(rate_threshold_r0) && rate_threshold_r0 > 0,
            "NetworkConfig.rate_threshold_r0: must be > 0");
    require(std::isfinite(alpha) && alpha > 2.0, "NetworkConfig.alpha: must be > 2");
    require(std::isfinite(tx_power_dbm), "NetworkConfig.tx_power_dbm: must be finite");
    require(num_files_f >= 1, "NetworkConfig.num_files_f: must be >= 1");
    require(cache_size_c >= 1 && cache_size_c <= num_files_f,
            "NetworkConfig.cache_size_c: must satisfy 1 <= C <= F");
    require(window_tau >= 1, "NetworkConfig.window_tau: must be >= 1");
}

bool PopularityVector::is_valid(double tol) const {
    if (probs.empty()) return false;
    double sum = 0.0;
    for (double p : probs) {
        if (!finite_in_unit(p, 0.0)) return false;
        sum += p;
    }
    return std::fabs(sum - 1.0) <= tol;
}

void PopularityVector::validate(double tol) const {
    require(!probs.empty(), "PopularityVector: empty");
    double sum = 0.0;
    for (std::size_t f = 0; f < probs.size(); ++f) {
        require(std::isfinite(probs[f]) && probs[f] >= 0.0 && probs[f] <= 1.0,
                "PopularityVector.probs[" + std::to_string(f) + "]: must be in [0,1]");
        sum += probs[f];
    }
    require(std::fabs(sum - 1.0) <= tol, "PopularityVector: entries must sum to 1");
}

bool Policy::is_feasible(std::size_t cache_size_c, double tol) const {
    if (!(std::isfinite(beta) && beta > 0.0 && beta <= 1.0)) return false;
    double sum = 0.0;
    for (double v : q) {
        if (!finite_in_unit(v, tol)) return false;
        sum += v;
    }
    return sum <= static_cast<double>(cache_size_c) + tol;
}

void Policy::validate_feasible(std::size_t cache_size_c, double tol) const {
    require(is_feasible(cache_size_c, tol),
            "Policy: infeasible (need q in [0,1]^F, sum q <= C, 0 < beta <= 1)");
}

std::vector<double> HistoryWindow::flatten() const {
    std::vector<double> out;
    out.reserve(rows.size() * num_files());
    for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
}

bool HistoryWindow::is_valid(double tol) const {
    if (rows.empty()) return false;
    const std::size_t f = rows.front().size();
    for (const auto& r : rows) {
        if (r.size() != f || f == 0) return false;
        double sum = 0.0;
        for (double v : r) {
            if (!finite_in_unit(v, 0.0)) return false;
            sum += v;
        }
        if (std::fabs(sum - 1.0) > tol) return false;
    }
    return true;
}

void HistoryWindow::validate(double tol) const {
    require(is_valid(tol), "HistoryWindow: rows must be equal-length popularity vectors (sum 1)");
}

void TrainingSample::validate() const {
    target.validate();
    history.validate();
    require(history.num_files() == target.size(),
            "TrainingSample: history and target dimensions disagree");
}

void MultiplierSet::validate() const {
    require(std::isfinite(xi_c) && xi_c >= 0.0, "MultiplierSet.xi_c: must be >= 0");
    for (std::size_t f = 0; f < xi_f.size(); ++f)
        require(std::isfinite(xi_f[f]) && xi_f[f] >= 0.0,
                "MultiplierSet.xi_f[" + std::to_string(f) + "]: must be >= 0");
}

}  // namespace procache

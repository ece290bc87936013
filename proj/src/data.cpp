#include "procache/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "procache/log.hpp"
#include "procache/rng.hpp"

namespace procache {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void renormalize_row(std::vector<double>& row, const char* what) {
    double sum = 0.0;
    for (double v : row) sum += v;
    if (sum <= 0.0) {
        log_warn(std::string(what) + ": all-zero popularity row, substituting uniform");
        std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(row.size()));
        return;
    }
    for (double& v : row) v /= sum;
}

PopularitySeries estimate_over(const RequestLog& log,
                               const std::vector<std::uint64_t>& retained) {
    const std::size_t P = log.num_periods();
    const std::size_t F = retained.size();
    std::map<std::uint64_t, std::size_t> col;
    for (std::size_t f = 0; f < F; ++f) col[retained[f]] = f;

    std::vector<std::vector<double>> counts(P, std::vector<double>(F, 0.0));
    for (const Request& r : log.events) {
        auto it = col.find(r.file_id);
        if (it != col.end()) counts[r.period][it->second] += 1.0;
    }

    PopularitySeries out;
    out.file_ids = retained;
    out.periods.resize(P);
    for (std::size_t t = 0; t < P; ++t) {
        double total = 0.0;
        for (double c : counts[t]) total += c;
        if (total <= 0.0) {
            log_warn("estimate_popularity: period " + std::to_string(t) +
                     " has no retained requests, emitting uniform");
            out.periods[t].probs.assign(F, 1.0 / static_cast<double>(F));
        } else {
            out.periods[t].probs.resize(F);
            for (std::size_t f = 0; f < F; ++f) out.periods[t].probs[f] = counts[t][f] / total;
        }
    }
    return out;
}

// total-request ranking: count desc, id asc
std::vector<std::pair<std::uint64_t, std::size_t>> total_counts(const RequestLog& log) {
    std::map<std::uint64_t, std::size_t> totals;
    for (const Request& r : log.events) ++totals[r.file_id];
    std::vector<std::pair<std::uint64_t, std::size_t>> v(totals.begin(), totals.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return v;
}

}  // namespace

std::size_t RequestLog::num_periods() const {
    std::size_t maxp = 0;
    for (const Request& r : events) maxp = std::max(maxp, r.period);
    return events.empty() ? 0 : maxp + 1;
}

void RequestLog::validate() const {
    if (events.empty()) throw std::invalid_argument("RequestLog: empty");
    const std::size_t P = num_periods();
    std::vector<bool> seen(P, false);
    for (const Request& r : events) seen[r.period] = true;
    for (std::size_t t = 0; t < P; ++t)
        if (!seen[t])
            throw std::invalid_argument("RequestLog: period indices not contiguous (missing " +
                                        std::to_string(t) + ")");
}

void ShotNoiseParams::validate() const {
    auto pos = [](double v, const char* name) {
        if (!(v > 0))
            throw std::invalid_argument(std::string("ShotNoiseParams.") + name + ": must be > 0");
    };
    pos(arrival_rate, "arrival_rate");
    pos(volume_pareto_shape, "volume_pareto_shape");
    pos(volume_pareto_scale, "volume_pareto_scale");
    pos(lifespan_decay, "lifespan_decay");
    if (num_periods < 1) throw std::invalid_argument("ShotNoiseParams.num_periods: must be >= 1");
    if (num_files_cap < 1)
        throw std::invalid_argument("ShotNoiseParams.num_files_cap: must be >= 1");
}

PopularitySeries estimate_popularity(const RequestLog& log, double keep_fraction) {
    log.validate();
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
        throw std::invalid_argument("estimate_popularity: keep_fraction must be in (0,1]");
    const auto ranked = total_counts(log);
    const std::size_t keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(keep_fraction * static_cast<double>(ranked.size()))));
    std::vector<std::uint64_t> retained;
    retained.reserve(keep);
    for (std::size_t i = 0; i < std::min(keep, ranked.size()); ++i)
        retained.push_back(ranked[i].first);
    std::sort(retained.begin(), retained.end());
    return estimate_over(log, retained);
}

PopularitySeries estimate_popularity_min_requests(const RequestLog& log,
                                                  std::size_t min_total_requests) {
    log.validate();
    std::vector<std::uint64_t> retained;
    for (const auto& [id, count] : total_counts(log))
        if (count >= min_total_requests) retained.push_back(id);
    if (retained.empty())
        throw std::invalid_argument("estimate_popularity_min_requests: threshold retains no file");
    std::sort(retained.begin(), retained.end());
    return estimate_over(log, retained);
}

std::vector<FileRecord> build_records(const PopularitySeries& series, std::size_t tau) {
    if (tau < 1) throw std::invalid_argument("build_records: tau must be >= 1");
    if (series.num_periods() < tau + 1)
        throw std::invalid_argument("build_records: series shorter than tau+1 periods");
    const std::size_t F = series.num_files();
    std::vector<FileRecord> out;
    out.reserve((series.num_periods() - tau) * F);
    for (std::size_t t = tau; t < series.num_periods(); ++t) {
        for (std::size_t f = 0; f < F; ++f) {
            FileRecord rec;
            rec.file_id = series.file_ids[f];
            rec.end_period = t;
            rec.values.resize(tau + 1);
            for (std::size_t j = 0; j <= tau; ++j) rec.values[j] = series.periods[t - j].probs[f];
            out.push_back(std::move(rec));
        }
    }
    return out;
}

std::vector<TrainingSample> repeat_sample(const std::vector<FileRecord>& records, std::size_t F,
                                          std::size_t count, std::uint64_t seed) {
    if (records.size() < F)
        throw std::invalid_argument("repeat_sample: need at least F records");
    if (F < 1) throw std::invalid_argument("repeat_sample: F must be >= 1");
    const std::size_t tau = records.front().values.size() - 1;
    for (const FileRecord& r : records)
        if (r.values.size() != tau + 1)
            throw std::invalid_argument("repeat_sample: records have inconsistent lengths");

    std::vector<TrainingSample> out;
    out.reserve(count);
    std::vector<std::size_t> pool(records.size());
    for (std::size_t s = 0; s < count; ++s) {
        Rng rng(derive_seed(seed, s));
        std::iota(pool.begin(), pool.end(), 0);
        // partial Fisher-Yates: first F entries are a uniform draw without
        // replacement
        for (std::size_t i = 0; i < F; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.bounded(pool.size() - i));
            std::swap(pool[i], pool[j]);
        }
        TrainingSample sample;
        sample.target.probs.resize(F);
        sample.history.rows.assign(tau, std::vector<double>(F));
        for (std::size_t f = 0; f < F; ++f) {
            const FileRecord& rec = records[pool[f]];
            sample.target.probs[f] = rec.values[0];
            for (std::size_t j = 0; j < tau; ++j) sample.history.rows[j][f] = rec.values[j + 1];
        }
        renormalize_row(sample.target.probs, "repeat_sample target");
        for (auto& row : sample.history.rows) renormalize_row(row, "repeat_sample history");
        out.push_back(std::move(sample));
    }
    return out;
}

std::vector<std::size_t> rank_permutation(const TrainingSample& sample, RankMode mode) {
    const std::vector<double>& key =
        mode == RankMode::by_previous_period ? sample.history.rows.front() : sample.target.probs;
    std::vector<std::size_t> perm(key.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(),
                     [&key](std::size_t a, std::size_t b) { return key[a] > key[b]; });
    return perm;
}

TrainingSample rank_for_training(const TrainingSample& sample, RankMode mode) {
    sample.validate();
    const std::vector<std::size_t> perm = rank_permutation(sample, mode);
    TrainingSample out;
    const std::size_t F = sample.num_files();
    out.target.probs.resize(F);
    out.history.rows.assign(sample.history.tau(), std::vector<double>(F));
    for (std::size_t i = 0; i < F; ++i) {
        out.target.probs[i] = sample.target.probs[perm[i]];
        for (std::size_t j = 0; j < sample.history.tau(); ++j)
            out.history.rows[j][i] = sample.history.rows[j][perm[i]];
    }
    return out;
}

PopularitySeries gen_zipf(std::size_t F, double zipf_exponent, std::size_t num_periods) {
    if (F < 1 || num_periods < 1)
        throw std::invalid_argument("gen_zipf: F and num_periods must be >= 1");
    if (zipf_exponent < 0) throw std::invalid_argument("gen_zipf: exponent must be >= 0");
    PopularityVector p;
    p.probs.resize(F);
    double sum = 0.0;
    for (std::size_t f = 0; f < F; ++f) {
        p.probs[f] = std::pow(static_cast<double>(f + 1), -zipf_exponent);
        sum += p.probs[f];
    }
    for (double& v : p.probs) v /= sum;

    PopularitySeries out;
    out.file_ids.resize(F);
    std::iota(out.file_ids.begin(), out.file_ids.end(), 0);
    out.periods.assign(num_periods, p);
    return out;
}

ShotNoiseResult gen_shot_noise(const ShotNoiseParams& params, std::uint64_t seed) {
    params.validate();
    Rng rng(seed);

    struct File {
        std::size_t arrival;
        double volume;
    };
    std::vector<File> files;
    for (std::size_t t = 0; t < params.num_periods && files.size() < params.num_files_cap; ++t) {
        std::uint64_t arrivals = rng.poisson(params.arrival_rate);
        if (t == 0 && arrivals == 0) arrivals = 1;  // keep period 0 non-degenerate
        for (std::uint64_t k = 0; k < arrivals && files.size() < params.num_files_cap; ++k)
            files.push_back({t, rng.pareto(params.volume_pareto_shape, params.volume_pareto_scale)});
    }

    const std::size_t F = files.size();
    ShotNoiseResult out;
    out.series.file_ids.resize(F);
    std::iota(out.series.file_ids.begin(), out.series.file_ids.end(), 0);
    out.series.periods.resize(params.num_periods);

    std::vector<double> intensity(F);
    for (std::size_t t = 0; t < params.num_periods; ++t) {
        double total = 0.0;
        for (std::size_t f = 0; f < F; ++f) {
            if (t < files[f].arrival) {
                intensity[f] = 0.0;
            } else {
                intensity[f] = files[f].volume *
                               std::exp(-params.lifespan_decay *
                                        static_cast<double>(t - files[f].arrival));
            }
            total += intensity[f];
        }
        auto& row = out.series.periods[t].probs;
        row.resize(F);
        if (total <= 0.0) {
            std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(F));
        } else {
            for (std::size_t f = 0; f < F; ++f) row[f] = intensity[f] / total;
        }
        for (std::size_t f = 0; f < F; ++f) {
            const std::uint64_t n = rng.poisson(intensity[f]);
            for (std::uint64_t k = 0; k < n; ++k) out.log.events.push_back({t, f});
        }
        if (out.log.events.empty() || out.log.events.back().period != t) {
            // keep period indices contiguous: one request for the dominant file
            std::size_t top = 0;
            for (std::size_t f = 1; f < F; ++f)
                if (intensity[f] > intensity[top]) top = f;
            out.log.events.push_back({t, top});
        }
    }
    return out;
}

std::pair<std::vector<FileRecord>, std::vector<FileRecord>> split_records(
    const std::vector<FileRecord>& records, double test_fraction, std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0))
        throw std::invalid_argument("split_records: test_fraction must be in [0,1)");
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.bounded(i));
        std::swap(order[i - 1], order[j]);
    }
    const std::size_t n_test = static_cast<std::size_t>(
        std::llround(test_fraction * static_cast<double>(records.size())));
    std::pair<std::vector<FileRecord>, std::vector<FileRecord>> out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (i < n_test)
            out.second.push_back(records[order[i]]);
        else
            out.first.push_back(records[order[i]]);
    }
    return out;
}

void write_request_log_csv(const std::string& path, const RequestLog& log) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_request_log_csv: cannot open " + path);
    f << "period,file_id\n";
    for (const Request& r : log.events) f << r.period << "," << r.file_id << "\n";
}

RequestLog read_request_log_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_request_log_csv: cannot open " + path);
    RequestLog log;
    std::string line;
    if (!std::getline(f, line) || line != "period,file_id")
        throw std::runtime_error("read_request_log_csv: bad header in " + path);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        Request r;
        if (std::sscanf(line.c_str(), "%zu,%llu", &r.period,
                        reinterpret_cast<unsigned long long*>(&r.file_id)) != 2)
            throw std::runtime_error("read_request_log_csv: bad row '" + line + "'");
        log.events.push_back(r);
    }
    return log;
}

void write_series_csv(const std::string& path, const PopularitySeries& series) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_series_csv: cannot open " + path);
    f << "period,file_id,prob\n";
    for (std::size_t t = 0; t < series.num_periods(); ++t)
        for (std::size_t c = 0; c < series.num_files(); ++c)
            f << t << "," << series.file_ids[c] << "," << fmt_double(series.periods[t].probs[c])
              << "\n";
}

PopularitySeries read_series_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_series_csv: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || line != "period,file_id,prob")
        throw std::runtime_error("read_series_csv: bad header in " + path);
    std::map<std::uint64_t, std::size_t> col;
    std::vector<std::uint64_t> ids;
    std::vector<std::map<std::size_t, double>> rows;  // period -> (col -> prob)
    std::size_t max_period = 0;
    bool any = false;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::size_t period;
        unsigned long long id;
        double prob;
        if (std::sscanf(line.c_str(), "%zu,%llu,%lf", &period, &id, &prob) != 3)
            throw std::runtime_error("read_series_csv: bad row '" + line + "'");
        if (col.find(id) == col.end()) {
            col[id] = ids.size();
            ids.push_back(id);
        }
        if (period >= rows.size()) rows.resize(period + 1);
        rows[period][col[id]] = prob;
        max_period = std::max(max_period, period);
        any = true;
    }
    if (!any) throw std::runtime_error("read_series_csv: no data in " + path);
    PopularitySeries out;
    out.file_ids = ids;
    out.periods.resize(max_period + 1);
    for (std::size_t t = 0; t <= max_period; ++t) {
        out.periods[t].probs.assign(ids.size(), 0.0);
        for (const auto& [c, prob] : rows[t]) out.periods[t].probs[c] = prob;
    }
    return out;
}

void write_records_csv(const std::string& path, const std::vector<FileRecord>& records) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_records_csv: cannot open " + path);
    f << "file_id,end_period,values\n";
    for (const FileRecord& r : records) {
        f << r.file_id << "," << r.end_period;
        for (double v : r.values) f << "," << fmt_double(v);
        f << "\n";
    }
}

std::vector<FileRecord> read_records_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("read_records_csv: cannot open " + path);
    std::string line;
    if (!std::getline(f, line) || line != "file_id,end_period,values")
        throw std::runtime_error("read_records_csv: bad header in " + path);
    std::vector<FileRecord> out;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        FileRecord r;
        if (!std::getline(ss, tok, ',')) continue;
        r.file_id = std::stoull(tok);
        if (!std::getline(ss, tok, ','))
            throw std::runtime_error("read_records_csv: bad row '" + line + "'");
        r.end_period = std::stoull(tok);
        while (std::getline(ss, tok, ',')) r.values.push_back(std::stod(tok));
        if (r.values.empty())
            throw std::runtime_error("read_records_csv: record with no values");
        out.push_back(std::move(r));
    }
    return out;
}

void write_samples_csv(const std::string& csv_path, const std::string& manifest_path,
                       const std::vector<TrainingSample>& samples, std::uint64_t seed) {
    std::ofstream f(csv_path);
    if (!f) throw std::runtime_error("write_samples_csv: cannot open " + csv_path);
    f << "sample,row,file,value\n";
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const TrainingSample& ts = samples[s];
        for (std::size_t c = 0; c < ts.num_files(); ++c)
            f << s << ",0," << c << "," << fmt_double(ts.target.probs[c]) << "\n";
        for (std::size_t j = 0; j < ts.history.tau(); ++j)
            for (std::size_t c = 0; c < ts.num_files(); ++c)
                f << s << "," << (j + 1) << "," << c << ","
                  << fmt_double(ts.history.rows[j][c]) << "\n";
    }
    nlohmann::json manifest;
    manifest["num_files"] = samples.empty() ? 0 : samples.front().num_files();
    manifest["window_tau"] = samples.empty() ? 0 : samples.front().history.tau();
    manifest["count"] = samples.size();
    manifest["seed"] = seed;
    std::ofstream m(manifest_path);
    if (!m) throw std::runtime_error("write_samples_csv: cannot open " + manifest_path);
    m << manifest.dump(1) << "\n";
}

std::vector<TrainingSample> read_samples_csv(const std::string& csv_path) {
    std::ifstream f(csv_path);
    if (!f) throw std::runtime_error("read_samples_csv: cannot open " + csv_path);
    std::string line;
    if (!std::getline(f, line) || line != "sample,row,file,value")
        throw std::runtime_error("read_samples_csv: bad header in " + csv_path);
    struct Cell {
        std::size_t sample, row, file;
        double value;
    };
    std::vector<Cell> cells;
    std::size_t max_sample = 0, max_row = 0, max_file = 0;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        Cell c;
        if (std::sscanf(line.c_str(), "%zu,%zu,%zu,%lf", &c.sample, &c.row, &c.file, &c.value) != 4)
            throw std::runtime_error("read_samples_csv: bad row '" + line + "'");
        max_sample = std::max(max_sample, c.sample);
        max_row = std::max(max_row, c.row);
        max_file = std::max(max_file, c.file);
        cells.push_back(c);
    }
    if (cells.empty()) throw std::runtime_error("read_samples_csv: no data");
    const std::size_t F = max_file + 1;
    const std::size_t tau = max_row;  // rows 1..tau
    std::vector<TrainingSample> out(max_sample + 1);
    for (TrainingSample& s : out) {
        s.target.probs.assign(F, 0.0);
        s.history.rows.assign(tau, std::vector<double>(F, 0.0));
    }
    for (const Cell& c : cells) {
        if (c.row == 0)
            out[c.sample].target.probs[c.file] = c.value;
        else
            out[c.sample].history.rows[c.row - 1][c.file] = c.value;
    }
    return out;
}

}  // namespace procache

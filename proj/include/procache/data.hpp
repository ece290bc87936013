#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "procache/types.hpp"

namespace procache {

struct Request {
    std::size_t period = 0;
    std::uint64_t file_id = 0;
};

struct RequestLog {
    std::vector<Request> events;

    std::size_t num_periods() const;
    void validate() const;
};

/// Per-period popularity over a retained catalog; file_ids maps the column
/// index back to the original identifier.
struct PopularitySeries {
    std::vector<std::uint64_t> file_ids;
    std::vector<PopularityVector> periods;

    std::size_t num_periods() const { return periods.size(); }
    std::size_t num_files() const { return file_ids.size(); }
};

/// Popularity trajectory of one file over a window: values[0] is the
/// target period, values[1..tau] the preceding periods newest first.
struct FileRecord {
    std::uint64_t file_id = 0;
    std::size_t end_period = 0;  // the period of values[0]
    std::vector<double> values;
};

struct ShotNoiseParams {
    double arrival_rate = 2.0;          // new files per period
    double volume_pareto_shape = 1.5;   // request-volume distribution
    double volume_pareto_scale = 50.0;
    double lifespan_decay = 0.25;       // per-period exponential decay
    std::size_t num_periods = 40;
    std::size_t num_files_cap = 64;

    void validate() const;
};

/// Retains the most-requested keep_fraction of the catalog (ties broken by
/// lower file id) and normalizes per-period counts over the retained files.
/// Periods with zero retained requests become uniform, with a warning.
PopularitySeries estimate_popularity(const RequestLog& log, double keep_fraction);

/// Alternative filter: retain files with at least min_total_requests.
PopularitySeries estimate_popularity_min_requests(const RequestLog& log,
                                                  std::size_t min_total_requests);

/// One record per retained file per window position; exactly
/// (num_periods - tau) positions.
std::vector<FileRecord> build_records(const PopularitySeries& series, std::size_t tau);

/// Each sample draws F records uniformly without replacement and
/// renormalizes every period row to sum 1. Deterministic per seed.
std::vector<TrainingSample> repeat_sample(const std::vector<FileRecord>& records, std::size_t F,
                                          std::size_t count, std::uint64_t seed);

enum class RankMode { by_previous_period, by_target };

/// Stable descending permutation of the file columns keyed on the previous
/// period (implicit prediction) or on the target (known-future methods).
std::vector<std::size_t> rank_permutation(const TrainingSample& sample, RankMode mode);

/// Applies rank_permutation consistently to history and target.
TrainingSample rank_for_training(const TrainingSample& sample, RankMode mode);

/// Stationary Zipf series: p_f proportional to (f+1)^-exponent.
PopularitySeries gen_zipf(std::size_t F, double zipf_exponent, std::size_t num_periods);

struct ShotNoiseResult {
    PopularitySeries series;  // intensity-normalized true popularity
    RequestLog log;           // Poisson request counts drawn from intensities
};

/// Files arrive as a Poisson process (at least one file in period 0); file
/// f contributes intensity volume_f * exp(-decay*(t - arrival_f)) from its
/// arrival on. Deterministic per seed.
ShotNoiseResult gen_shot_noise(const ShotNoiseParams& params, std::uint64_t seed);

/// Seeded 80/20-style split by record.
std::pair<std::vector<FileRecord>, std::vector<FileRecord>> split_records(
    const std::vector<FileRecord>& records, double test_fraction, std::uint64_t seed);

// CSV formats (documented in the README):
//   request log:        header "period,file_id", one row per request
//   popularity series:  header "period,file_id,prob"
//   records:            header "file_id,end_period,v0,...,vtau"
void write_request_log_csv(const std::string& path, const RequestLog& log);
RequestLog read_request_log_csv(const std::string& path);
void write_series_csv(const std::string& path, const PopularitySeries& series);
PopularitySeries read_series_csv(const std::string& path);
void write_records_csv(const std::string& path, const std::vector<FileRecord>& records);
std::vector<FileRecord> read_records_csv(const std::string& path);

/// Sample bundle: samples.csv (sample,row,file,value with row 0 = target,
/// rows 1..tau = history newest first) plus a JSON manifest carrying
/// (F, tau, seed, count).
void write_samples_csv(const std::string& csv_path, const std::string& manifest_path,
                       const std::vector<TrainingSample>& samples, std::uint64_t seed);
std::vector<TrainingSample> read_samples_csv(const std::string& csv_path);

}  // namespace procache

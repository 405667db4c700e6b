#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pgl/analytics.hpp"
#include "pgl/schedule.hpp"
#include "pgl/stats.hpp"

namespace pgl {

inline constexpr const char* kSchemaLine = "# pgl-schema v1";

enum class OutputFormat { Csv, Json };

enum class Mode { Quenched, Annealed, Bounds, Nonconv };
std::string_view to_string(Mode mode);

struct ExperimentConfig {
  /// Schedule specs in the `zero | const:.. | logpow:.. | table:..` grammar.
  std::vector<std::string> schedules{"logpow:0.25", "logpow:0.5", "logpow:1.0", "zero"};
  std::vector<unsigned> k_list{10, 12, 14, 16, 18, 20};
  /// Sequences per k in quenched mode.
  std::uint64_t seeds = 5;
  std::uint64_t master_seed = 20251204;
  /// Sequences (annealed) or (sequence, word) draws (nonconv) per k.
  std::uint64_t trials = 50;
  double epsilon = 0.1;
  double theta = 0.25;
  double eta = 0.1;
  std::uint64_t mc_samples = 4096;
  unsigned exact_cap = 20;
  /// Per-record wall-clock limit in seconds; records over it are flagged, 0 disables.
  double time_limit = 0.0;
  /// Adds a wall_time column. Off by default because it breaks byte-identical reruns.
  bool timing = false;
  /// Cap on union-bound evaluations per k in nonconv mode.
  std::uint64_t union_words = 32;
  std::vector<Mode> modes{Mode::Annealed};
  std::string out_path;
  OutputFormat format = OutputFormat::Csv;

  /// Throws DomainError on an invalid field for `mode` (k range, trials >= 1, parameter ranges).
  void validate(Mode mode) const;
  ChenSteinParams chen_stein_params(unsigned k) const;
};

/// Reads a JSON object whose keys mirror ExperimentConfig; absent keys keep their defaults.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});

/// Per-trial seed: derive_seed(master, trial_index).
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial_index);

struct ResultRecord {
  std::string schedule;
  unsigned k = 0;
  std::uint64_t seed = 0;
  /// quenched, annealed-trial, annealed
  std::string mode;
  double p0 = 0.0, p1 = 0.0, p2 = 0.0;
  double p0_stderr = 0.0, p1_stderr = 0.0, p2_stderr = 0.0;
  double tv_to_po1 = 0.0;
  std::optional<double> cs_total;
  double wall_time = 0.0;
  bool timeout = false;
  std::string error;
};

/// One record per (schedule, k, seed): x of length 2^k + k - 1, histogram, quenched law, TV to Po(1).
std::vector<ResultRecord> run_quenched(const ExperimentConfig& config);

struct AnnealedResult {
  std::vector<ResultRecord> trials;
  /// One per (schedule, k); seed holds the master seed.
  std::vector<ResultRecord> aggregates;
  std::vector<AnnealedAggregate> laws;
};

/// Averages `trials` quenched laws per (schedule, k).
AnnealedResult run_annealed(const ExperimentConfig& config);

struct BoundsRecord {
  std::string schedule;
  ChenSteinReport report;
  std::string note;
};

std::vector<BoundsRecord> run_bounds(const ExperimentConfig& config);

struct NonconvRow {
  std::string schedule;
  unsigned k = 0;
  double eta = 0.0;
  TailMeasure tail;
  std::uint64_t trials = 0;
  /// Draws whose word fell in the tail set.
  std::uint64_t tail_hits = 0;
  /// Draws with the word in the tail set and M_k >= 1.
  std::uint64_t intersection = 0;
  double intersection_estimate = 0.0;
  Interval intersection_ci;
  /// Mean union bound over (at most union_words) sampled tail-set words; unset if none.
  std::optional<double> union_bound_mean;
  std::uint64_t union_words = 0;
  std::uint64_t zero_count = 0;
  double p0_estimate = 0.0;
  Interval p0_ci;
  std::string error;
};

std::vector<NonconvRow> run_nonconv(const ExperimentConfig& config);

struct ScheduleInfo {
  std::string label;
  ValidationReport validation;
  KakutaniClass kakutani = KakutaniClass::Unknown;
  double cesaro_1e3 = 0.0;
  double cesaro_1e6 = 0.0;
  std::optional<std::uint64_t> j0;
  std::vector<std::pair<std::uint64_t, double>> samples;
};

/// Throws ParseError for an unparseable spec.
ScheduleInfo schedule_info(const std::string& spec);
void print_schedule_info(std::ostream& out, const ScheduleInfo& info);

void write_records_csv(std::ostream& out, const std::vector<ResultRecord>& records, bool timing);
void write_records_json(std::ostream& out, const std::vector<ResultRecord>& records, bool timing);
void write_bounds_csv(std::ostream& out, const std::vector<BoundsRecord>& records);
void write_bounds_json(std::ostream& out, const std::vector<BoundsRecord>& records);
void write_nonconv_csv(std::ostream& out, const std::vector<NonconvRow>& rows);
void write_nonconv_json(std::ostream& out, const std::vector<NonconvRow>& rows);

/// Fast internal consistency checks; returns the failures as text (empty on success).
std::vector<std::string> selftest();

}  // namespace pgl

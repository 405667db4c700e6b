#include "pgl/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "pgl/counter.hpp"
#include "pgl/errors.hpp"
#include "pgl/parallel.hpp"
#include "pgl/reference.hpp"
#include "pgl/rng.hpp"
#include "pgl/sampler.hpp"

namespace pgl {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Quenched:
      return "quenched";
    case Mode::Annealed:
      return "annealed";
    case Mode::Bounds:
      return "bounds";
    case Mode::Nonconv:
      break;
  }
  return "nonconv";
}

namespace {

Mode mode_from_string(const std::string& s) {
  for (Mode m : {Mode::Quenched, Mode::Annealed, Mode::Bounds, Mode::Nonconv}) {
    if (to_string(m) == s) return m;
  }
  throw DomainError("unknown mode '" + s + "'");
}

std::string real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_real(const std::optional<double>& v) { return v ? real(*v) : std::string(); }

/// CSV field quoting for labels that may contain separators.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct ParsedSchedule {
  std::string spec;
  BiasSchedule schedule;
};

std::vector<ParsedSchedule> parse_all(const ExperimentConfig& config) {
  std::vector<ParsedSchedule> out;
  for (const auto& spec : config.schedules) {
    BiasSchedule s = parse_schedule(spec);
    const auto report = validate(s);
    if (!report.ok()) throw DomainError("schedule '" + spec + "' is invalid: " + report.violations.front());
    out.push_back({spec, std::move(s)});
  }
  return out;
}

std::uint64_t windows_length(unsigned k) { return (std::uint64_t{1} << k) + k - 1; }

const CountDistribution& poisson_one() {
  static const CountDistribution po = poisson_distribution(1.0);
  return po;
}

void summarize(ResultRecord& r, const CountDistribution& law) {
  r.p0 = law(0);
  r.p1 = law(1);
  r.p2 = law(2);
  r.tv_to_po1 = tv_distance(law, poisson_one()).distance;
}

struct Task {
  std::size_t schedule;
  unsigned k;
  std::uint64_t trial;
};

std::vector<Task> tasks_for(const ExperimentConfig& config, std::size_t nschedules, std::uint64_t per_k) {
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < nschedules; ++s) {
    for (unsigned k : config.k_list) {
      for (std::uint64_t t = 0; t < per_k; ++t) tasks.push_back({s, k, t});
    }
  }
  return tasks;
}

/// Builds a quenched record; failures are reported in the record.
ResultRecord quenched_record(const ParsedSchedule& ps, unsigned k, std::uint64_t seed, const char* mode,
                             const ExperimentConfig& config, CountDistribution* law_out) {
  ResultRecord r;
  r.schedule = ps.spec;
  r.k = k;
  r.seed = seed;
  r.mode = mode;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const PackedSequence x = sample_sequence(ps.schedule, windows_length(k), seed);
    const WindowHistogram h = window_histogram(x, k);
    CountDistribution law = quenched_distribution(h);
    law.label = "quenched(seed=" + std::to_string(seed) + ")";
    summarize(r, law);
    if (law_out) *law_out = std::move(law);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.wall_time = seconds_since(t0);
  r.timeout = config.time_limit > 0.0 && r.wall_time > config.time_limit;
  return r;
}

}  // namespace

void ExperimentConfig::validate(Mode mode) const {
  if (schedules.empty()) throw DomainError("at least one schedule is required");
  if (k_list.empty()) throw DomainError("k list is empty");
  const unsigned kmax = (mode == Mode::Bounds) ? 60 : 26;
  for (unsigned k : k_list) {
    if (k < 1 || k > kmax) {
      throw DomainError("k=" + std::to_string(k) + " outside [1, " + std::to_string(kmax) + "] for " +
                        std::string(to_string(mode)) + " mode");
    }
  }
  if (trials < 1) throw DomainError("trials must be >= 1");
  if (seeds < 1) throw DomainError("seeds must be >= 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(theta > 0.0 && theta < 0.5)) throw DomainError("theta must lie in (0, 1/2)");
  if (!(eta > 0.0)) throw DomainError("eta must be > 0");
  if (exact_cap > kMaxExactCap) throw DomainError("exact_cap must be <= 26");
  if (mc_samples < 1) throw DomainError("mc_samples must be >= 1");
}

ChenSteinParams ExperimentConfig::chen_stein_params(unsigned k) const {
  ChenSteinParams p;
  p.k = k;
  p.epsilon = epsilon;
  p.theta = theta;
  p.mc_samples = mc_samples;
  p.exact_cap = exact_cap;
  p.seed = master_seed;
  return p;
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c) {
  if (!j.is_object()) throw DomainError("config must be a JSON object");
  if (j.contains("schedules")) {
    const auto& s = j.at("schedules");
    c.schedules = s.is_string() ? std::vector<std::string>{s.get<std::string>()} : s.get<std::vector<std::string>>();
  }
  if (j.contains("schedule")) c.schedules = {j.at("schedule").get<std::string>()};
  if (j.contains("k_list")) c.k_list = j.at("k_list").get<std::vector<unsigned>>();
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::uint64_t>();
  if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
  if (j.contains("trials")) c.trials = j.at("trials").get<std::uint64_t>();
  if (j.contains("epsilon")) c.epsilon = j.at("epsilon").get<double>();
  if (j.contains("theta")) c.theta = j.at("theta").get<double>();
  if (j.contains("eta")) c.eta = j.at("eta").get<double>();
  if (j.contains("mc_samples")) c.mc_samples = j.at("mc_samples").get<std::uint64_t>();
  if (j.contains("exact_cap")) c.exact_cap = j.at("exact_cap").get<unsigned>();
  if (j.contains("time_limit")) c.time_limit = j.at("time_limit").get<double>();
  if (j.contains("timing")) c.timing = j.at("timing").get<bool>();
  if (j.contains("union_words")) c.union_words = j.at("union_words").get<std::uint64_t>();
  if (j.contains("modes")) {
    c.modes.clear();
    for (const auto& m : j.at("modes")) c.modes.push_back(mode_from_string(m.get<std::string>()));
  }
  if (j.contains("out")) c.out_path = j.at("out").get<std::string>();
  if (j.contains("format")) {
    const auto f = j.at("format").get<std::string>();
    if (f == "csv") {
      c.format = OutputFormat::Csv;
    } else if (f == "json") {
      c.format = OutputFormat::Json;
    } else {
      throw DomainError("format must be csv or json");
    }
  }
  return c;
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial_index) { return derive_seed(master, trial_index); }

std::vector<ResultRecord> run_quenched(const ExperimentConfig& config) {
  config.validate(Mode::Quenched);
  const auto schedules = parse_all(config);
  const auto tasks = tasks_for(config, schedules.size(), config.seeds);
  std::vector<ResultRecord> records(tasks.size());
  parallel::for_blocks(tasks.size(), [&](std::size_t i) {
    const Task& t = tasks[i];
    records[i] = quenched_record(schedules[t.schedule], t.k, trial_seed(config.master_seed, t.trial), "quenched",
                                 config, nullptr);
  });
  return records;
}

AnnealedResult run_annealed(const ExperimentConfig& config) {
  config.validate(Mode::Annealed);
  const auto schedules = parse_all(config);
  const auto tasks = tasks_for(config, schedules.size(), config.trials);
  AnnealedResult out;
  out.trials.resize(tasks.size());
  std::vector<CountDistribution> laws(tasks.size());
  parallel::for_blocks(tasks.size(), [&](std::size_t i) {
    const Task& t = tasks[i];
    out.trials[i] = quenched_record(schedules[t.schedule], t.k, trial_seed(config.master_seed, t.trial),
                                    "annealed-trial", config, &laws[i]);
  });

  // Tasks are laid out as consecutive runs of `trials` per (schedule, k).
  const std::size_t per = static_cast<std::size_t>(config.trials);
  for (std::size_t first = 0; first < tasks.size(); first += per) {
    ResultRecord agg;
    agg.schedule = schedules[tasks[first].schedule].spec;
    agg.k = tasks[first].k;
    agg.seed = config.master_seed;
    agg.mode = "annealed";
    std::vector<CountDistribution> ok;
    for (std::size_t i = first; i < first + per; ++i) {
      agg.wall_time += out.trials[i].wall_time;
      agg.timeout = agg.timeout || out.trials[i].timeout;
      if (out.trials[i].error.empty()) {
        ok.push_back(std::move(laws[i]));
      } else if (agg.error.empty()) {
        agg.error = out.trials[i].error;
      }
    }
    AnnealedAggregate law;
    if (!ok.empty()) {
      law = aggregate_annealed(ok);
      summarize(agg, law.mean);
      auto se = [&](std::uint64_t m) {
        const auto it = law.stderr.find(m);
        return it == law.stderr.end() ? 0.0 : it->second;
      };
      agg.p0_stderr = se(0);
      agg.p1_stderr = se(1);
      agg.p2_stderr = se(2);
    }
    out.aggregates.push_back(std::move(agg));
    out.laws.push_back(std::move(law));
  }
  return out;
}

std::vector<BoundsRecord> run_bounds(const ExperimentConfig& config) {
  config.validate(Mode::Bounds);
  const auto schedules = parse_all(config);
  const auto tasks = tasks_for(config, schedules.size(), 1);
  std::vector<BoundsRecord> out(tasks.size());
  parallel::for_blocks(tasks.size(), [&](std::size_t i) {
    const Task& t = tasks[i];
    BoundsRecord& rec = out[i];
    rec.schedule = schedules[t.schedule].spec;
    try {
      const auto params = config.chen_stein_params(t.k);
      rec.report = chen_stein_terms(schedules[t.schedule].schedule, params);
      if (rec.report.B_mode == TermMode::Bound) rec.note = "B above exact_cap: pair-overlap bound";
      if (rec.report.C_mode != TermMode::Exact) {
        if (!rec.note.empty()) rec.note += "; ";
        rec.note += rec.report.C_mode == TermMode::Bound ? "C stratified over j" : "C stratified Monte Carlo";
      }
    } catch (const std::exception& e) {
      rec.report.k = t.k;
      rec.note = std::string("error: ") + e.what();
    }
  });
  return out;
}

std::vector<NonconvRow> run_nonconv(const ExperimentConfig& config) {
  config.validate(Mode::Nonconv);
  const auto schedules = parse_all(config);
  std::vector<NonconvRow> rows;
  for (const auto& ps : schedules) {
    for (unsigned k : config.k_list) {
      NonconvRow row;
      row.schedule = ps.spec;
      row.k = k;
      row.eta = config.eta;
      row.trials = config.trials;
      row.tail = tail_set_measure(k, config.eta);

      struct Draw {
        Word word;
        bool in_tail = false;
        std::uint64_t hits = 0;
        std::string error;
      };
      std::vector<Draw> draws(static_cast<std::size_t>(config.trials));
      parallel::for_blocks(draws.size(), [&](std::size_t t) {
        Draw& d = draws[t];
        try {
          const std::uint64_t seed = trial_seed(config.master_seed, t);
          d.word = sample_word(k, derive_seed(seed, 1));
          d.in_tail = in_tail_set(d.word, config.eta);
          const PackedSequence x = sample_sequence(ps.schedule, windows_length(k), seed);
          d.hits = count_word(x, d.word);
        } catch (const std::exception& e) {
          d.error = e.what();
        }
      });

      std::vector<Word> tail_words;
      std::uint64_t valid = 0;
      for (const auto& d : draws) {
        if (!d.error.empty()) {
          if (row.error.empty()) row.error = d.error;
          continue;
        }
        ++valid;
        row.zero_count += d.hits == 0;
        if (d.in_tail) {
          ++row.tail_hits;
          row.intersection += d.hits >= 1;
          if (tail_words.size() < config.union_words) tail_words.push_back(d.word);
        }
      }
      if (valid > 0) {
        const double n = static_cast<double>(valid);
        row.intersection_estimate = static_cast<double>(row.intersection) / n;
        row.intersection_ci = binomial_ci(row.intersection, valid, 0.95);
        row.p0_estimate = static_cast<double>(row.zero_count) / n;
        row.p0_ci = binomial_ci(row.zero_count, valid, 0.95);
      }
      if (!tail_words.empty() && k <= 30) {
        std::vector<double> ub(tail_words.size());
        parallel::for_blocks(ub.size(), [&](std::size_t i) { ub[i] = union_bound_hit_prob(ps.schedule, k, tail_words[i]); });
        double s = 0.0;
        for (double v : ub) s += v;
        row.union_bound_mean = s / static_cast<double>(ub.size());
        row.union_words = ub.size();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

ScheduleInfo schedule_info(const std::string& spec) {
  const BiasSchedule s = parse_schedule(spec);
  ScheduleInfo info;
  info.label = spec;
  info.validation = validate(s);
  info.kakutani = classify_kakutani(s);
  info.cesaro_1e3 = cesaro_average(s, 1000);
  info.cesaro_1e6 = cesaro_average(s, 1000000);
  info.j0 = overlap_j0(s);
  for (std::uint64_t n : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{10}, std::uint64_t{100},
                          std::uint64_t{1000}, std::uint64_t{1000000}, std::uint64_t{1} << 20,
                          std::uint64_t{1} << 40}) {
    info.samples.emplace_back(n, s.gamma(n));
  }
  return info;
}

void print_schedule_info(std::ostream& out, const ScheduleInfo& info) {
  out << "schedule: " << info.label << '\n';
  if (info.validation.ok()) {
    out << "validation: ok\n";
  } else {
    out << "validation: FAILED\n";
    for (const auto& v : info.validation.violations) out << "  - " << v << '\n';
  }
  out << "kakutani: " << to_string(info.kakutani) << '\n';
  out << "cesaro(N=1e3): " << real(info.cesaro_1e3) << '\n';
  out << "cesaro(N=1e6): " << real(info.cesaro_1e6) << '\n';
  out << "j0: " << (info.j0 ? std::to_string(*info.j0) : std::string("none")) << '\n';
  out << "gamma samples:\n";
  for (const auto& [n, g] : info.samples) out << "  gamma(" << n << ") = " << real(g) << '\n';
}

void write_records_csv(std::ostream& out, const std::vector<ResultRecord>& records, bool timing) {
  out << kSchemaLine << '\n';
  out << "schedule,k,seed,mode,p0,p1,p2,p0_stderr,p1_stderr,p2_stderr,tv_to_po1,cs_total,timeout,error";
  if (timing) out << ",wall_time";
  out << '\n';
  for (const auto& r : records) {
    out << field(r.schedule) << ',' << r.k << ',' << r.seed << ',' << r.mode << ',' << real(r.p0) << ','
        << real(r.p1) << ',' << real(r.p2) << ',' << real(r.p0_stderr) << ',' << real(r.p1_stderr) << ','
        << real(r.p2_stderr) << ',' << real(r.tv_to_po1) << ',' << opt_real(r.cs_total) << ',' << (r.timeout ? 1 : 0)
        << ',' << field(r.error);
    if (timing) out << ',' << real(r.wall_time);
    out << '\n';
  }
}

void write_records_json(std::ostream& out, const std::vector<ResultRecord>& records, bool timing) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j{{"schedule", r.schedule}, {"k", r.k},
                     {"seed", r.seed},         {"mode", r.mode},
                     {"p0", r.p0},             {"p1", r.p1},
                     {"p2", r.p2},             {"p0_stderr", r.p0_stderr},
                     {"p1_stderr", r.p1_stderr}, {"p2_stderr", r.p2_stderr},
                     {"tv_to_po1", r.tv_to_po1}, {"cs_total", nullptr},
                     {"timeout", r.timeout},   {"error", r.error}};
    if (r.cs_total) j["cs_total"] = *r.cs_total;
    if (timing) j["wall_time"] = r.wall_time;
    arr.push_back(std::move(j));
  }
  out << nlohmann::json{{"schema", "pgl-schema v1"}, {"records", arr}}.dump(2) << '\n';
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundsRecord>& records) {
  out << kSchemaLine << '\n';
  out << "schedule,k,lambda,A,B,B_mode,C,C_mode,C_stderr,total,j0,epsilon,theta,note\n";
  for (const auto& rec : records) {
    const auto& r = rec.report;
    out << field(rec.schedule) << ',' << r.k << ',' << real(r.lambda) << ',' << real(r.A) << ',' << real(r.B) << ','
        << to_string(r.B_mode) << ',' << real(r.C) << ',' << to_string(r.C_mode) << ',' << real(r.C_stderr) << ','
        << real(r.total) << ',' << (r.j0 ? std::to_string(*r.j0) : std::string()) << ',' << real(r.epsilon) << ','
        << real(r.theta) << ',' << field(rec.note) << '\n';
  }
}

void write_bounds_json(std::ostream& out, const std::vector<BoundsRecord>& records) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& rec : records) {
    nlohmann::json j = rec.report;
    j["schedule"] = rec.schedule;
    j["note"] = rec.note;
    arr.push_back(std::move(j));
  }
  out << nlohmann::json{{"schema", "pgl-schema v1"}, {"reports", arr}}.dump(2) << '\n';
}

void write_nonconv_csv(std::ostream& out, const std::vector<NonconvRow>& rows) {
  out << kSchemaLine << '\n';
  out << "schedule,k,eta,tail_exact,tail_normal,trials,tail_hits,intersection,intersection_estimate,"
         "intersection_ci_lower,intersection_ci_upper,union_bound_mean,union_words,zero_count,p0_estimate,"
         "p0_ci_lower,p0_ci_upper,error\n";
  for (const auto& r : rows) {
    out << field(r.schedule) << ',' << r.k << ',' << real(r.eta) << ',' << real(r.tail.exact) << ','
        << real(r.tail.normal) << ',' << r.trials << ',' << r.tail_hits << ',' << r.intersection << ','
        << real(r.intersection_estimate) << ',' << real(r.intersection_ci.lower) << ','
        << real(r.intersection_ci.upper) << ',' << opt_real(r.union_bound_mean) << ',' << r.union_words << ','
        << r.zero_count << ',' << real(r.p0_estimate) << ',' << real(r.p0_ci.lower) << ',' << real(r.p0_ci.upper)
        << ',' << field(r.error) << '\n';
  }
}

void write_nonconv_json(std::ostream& out, const std::vector<NonconvRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"schedule", r.schedule},
                     {"k", r.k},
                     {"eta", r.eta},
                     {"tail_exact", r.tail.exact},
                     {"tail_normal", r.tail.normal},
                     {"trials", r.trials},
                     {"tail_hits", r.tail_hits},
                     {"intersection", r.intersection},
                     {"intersection_estimate", r.intersection_estimate},
                     {"intersection_ci", {r.intersection_ci.lower, r.intersection_ci.upper}},
                     {"union_bound_mean", nullptr},
                     {"union_words", r.union_words},
                     {"zero_count", r.zero_count},
                     {"p0_estimate", r.p0_estimate},
                     {"p0_ci", {r.p0_ci.lower, r.p0_ci.upper}},
                     {"error", r.error}};
    if (r.union_bound_mean) j["union_bound_mean"] = *r.union_bound_mean;
    arr.push_back(std::move(j));
  }
  out << nlohmann::json{{"schema", "pgl-schema v1"}, {"rows", arr}}.dump(2) << '\n';
}

std::vector<std::string> selftest() {
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };

  const auto zero = BiasSchedule::zero();
  const auto lp1 = BiasSchedule::log_power(1.0);
  const auto lp25 = BiasSchedule::log_power(0.25);

  const auto x = sample_sequence(lp25, windows_length(12), 7);
  check(x == reference::sample_sequence(lp25, windows_length(12), 7), "parallel sampler matches serial reference");
  const auto h = window_histogram(x, 12);
  check(h.total() == 4096, "histogram conservation at k=12");
  check(h == reference::window_histogram(x, 12), "histogram matches serial reference");
  const auto law = quenched_distribution(h);
  check(std::abs(law.mean() - 1.0) < 1e-12 && std::abs(law.total_mass() - 1.0) < 1e-12, "quenched law has mean 1");

  check(std::abs(mean_p_jk(lp1, 5, 12) - 1.0) < 1e-9, "E_k[P_jk] = 1");
  const auto annealed = exact_annealed_pmf(BiasSchedule::constant(0.1), 2);
  check(std::abs(annealed.total_mass() - 1.0) < 1e-12 && std::abs(annealed.mean() - 1.0) < 1e-12,
        "exact annealed law normalized with mean 1");
  check(std::abs(a_term(3) - 0.53125) < 1e-15, "A_3 = 34/64");
  check(std::abs(tail_set_measure(4, 1.0).exact - 0.0625) < 1e-15, "tail set mass at k=4, eta=1");
  check(union_bound_hit_prob(zero, 10, sample_word(10, 3)) == 1.0, "union bound is 1 under the zero schedule");
  check(std::abs(pair_expectation(lp1, 3, 7, 6) - pair_expectation_factorized(lp1, 3, 7, 6)) < 1e-15,
        "overlap pair expectation routes agree");
  return failures;
}

}  // namespace pgl

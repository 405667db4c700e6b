// pgl: sweeps over schedules and window lengths for simple Poisson genericity experiments.

#include <charconv>
#include <fstream>
#include <iostream>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pgl/errors.hpp"
#include "pgl/parallel.hpp"
#include "pgl/runner.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitResource = 2;

struct Flags {
  std::vector<std::string> schedules;
  std::vector<std::string> k_tokens;
  std::uint64_t seeds = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0, theta = 0.0, eta = 0.0;
  std::uint64_t mc_samples = 0;
  unsigned exact_cap = 0;
  double time_limit = 0.0;
  std::uint64_t union_words = 0;
  std::string out;
  std::string format;
  std::string config;
  bool timing = false;
};

struct Bound {
  CLI::Option* schedule = nullptr;
  CLI::Option* k = nullptr;
  CLI::Option* seeds = nullptr;
  CLI::Option* trials = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* epsilon = nullptr;
  CLI::Option* theta = nullptr;
  CLI::Option* eta = nullptr;
  CLI::Option* mc_samples = nullptr;
  CLI::Option* exact_cap = nullptr;
  CLI::Option* time_limit = nullptr;
  CLI::Option* union_words = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* config = nullptr;
  CLI::Option* timing = nullptr;
};

Bound add_common(CLI::App* app, Flags& f) {
  Bound b;
  b.schedule = app->add_option("--schedule", f.schedules, "zero | const:c | logpow:c[:cap=v][:n0=n] | table:path");
  b.k = app->add_option("--k", f.k_tokens, "window lengths: 8,10 or 10..20[:2]")->delimiter(',');
  b.seeds = app->add_option("--seeds", f.seeds, "sequences per k (quenched)");
  b.trials = app->add_option("--trials", f.trials, "trials per k (annealed, nonconv)");
  b.seed = app->add_option("--seed", f.seed, "master seed");
  b.epsilon = app->add_option("--epsilon", f.epsilon);
  b.theta = app->add_option("--theta", f.theta);
  b.eta = app->add_option("--eta", f.eta);
  b.mc_samples = app->add_option("--mc-samples", f.mc_samples, "Monte Carlo samples for C_k strata");
  b.exact_cap = app->add_option("--exact-cap", f.exact_cap, "largest k for exact enumeration");
  b.time_limit = app->add_option("--time-limit", f.time_limit, "seconds per record before it is flagged");
  b.union_words = app->add_option("--union-words", f.union_words, "union-bound evaluations per k (nonconv)");
  b.out = app->add_option("--out", f.out, "output file (default stdout)");
  b.format = app->add_option("--format", f.format)->check(CLI::IsMember({"csv", "json"}));
  b.config = app->add_option("--config", f.config, "JSON config; flags override its values")->check(CLI::ExistingFile);
  b.timing = app->add_flag("--timing", f.timing, "add a wall_time column");
  return b;
}

unsigned parse_unsigned(const std::string& s) {
  unsigned v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw CLI::ValidationError("--k", "bad integer '" + s + "'");
  return v;
}

std::vector<unsigned> parse_k(const std::vector<std::string>& tokens) {
  std::vector<unsigned> ks;
  for (const auto& tok : tokens) {
    const auto dots = tok.find("..");
    if (dots == std::string::npos) {
      ks.push_back(parse_unsigned(tok));
      continue;
    }
    std::string hi = tok.substr(dots + 2);
    unsigned step = 1;
    if (const auto colon = hi.find(':'); colon != std::string::npos) {
      step = parse_unsigned(hi.substr(colon + 1));
      hi = hi.substr(0, colon);
    }
    const unsigned a = parse_unsigned(tok.substr(0, dots));
    const unsigned z = parse_unsigned(hi);
    if (step == 0 || z < a) throw CLI::ValidationError("--k", "bad range '" + tok + "'");
    for (unsigned k = a; k <= z; k += step) ks.push_back(k);
  }
  return ks;
}

pgl::ExperimentConfig build_config(const Flags& f, const Bound& b) {
  pgl::ExperimentConfig c;
  if (*b.config) {
    std::ifstream in(f.config);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw pgl::DomainError("config " + f.config + ": " + e.what());
    }
    c = pgl::config_from_json(j);
  }
  if (*b.schedule) c.schedules = f.schedules;
  if (*b.k) c.k_list = parse_k(f.k_tokens);
  if (*b.seeds) c.seeds = f.seeds;
  if (*b.trials) c.trials = f.trials;
  if (*b.seed) c.master_seed = f.seed;
  if (*b.epsilon) c.epsilon = f.epsilon;
  if (*b.theta) c.theta = f.theta;
  if (*b.eta) c.eta = f.eta;
  if (*b.mc_samples) c.mc_samples = f.mc_samples;
  if (*b.exact_cap) c.exact_cap = f.exact_cap;
  if (*b.time_limit) c.time_limit = f.time_limit;
  if (*b.union_words) c.union_words = f.union_words;
  if (*b.out) c.out_path = f.out;
  if (*b.format) c.format = f.format == "json" ? pgl::OutputFormat::Json : pgl::OutputFormat::Csv;
  if (*b.timing) c.timing = f.timing;
  return c;
}

template <class Write>
void emit(const pgl::ExperimentConfig& c, Write&& write) {
  if (c.out_path.empty()) {
    write(std::cout);
    return;
  }
  std::ofstream out(c.out_path, std::ios::binary);
  if (!out) throw pgl::ResourceError("cannot open " + c.out_path + " for writing");
  write(out);
  if (!out) throw pgl::ResourceError("write to " + c.out_path + " failed");
}

bool json_out(const pgl::ExperimentConfig& c) { return c.format == pgl::OutputFormat::Json; }

void run_mode(pgl::Mode mode, const pgl::ExperimentConfig& c) {
  using pgl::Mode;
  switch (mode) {
    case Mode::Quenched: {
      const auto recs = pgl::run_quenched(c);
      emit(c, [&](std::ostream& o) {
        json_out(c) ? pgl::write_records_json(o, recs, c.timing) : pgl::write_records_csv(o, recs, c.timing);
      });
      break;
    }
    case Mode::Annealed: {
      const auto res = pgl::run_annealed(c);
      emit(c, [&](std::ostream& o) {
        json_out(c) ? pgl::write_records_json(o, res.aggregates, c.timing)
                    : pgl::write_records_csv(o, res.aggregates, c.timing);
      });
      break;
    }
    case Mode::Bounds: {
      const auto recs = pgl::run_bounds(c);
      emit(c, [&](std::ostream& o) { json_out(c) ? pgl::write_bounds_json(o, recs) : pgl::write_bounds_csv(o, recs); });
      break;
    }
    case Mode::Nonconv: {
      const auto rows = pgl::run_nonconv(c);
      emit(c, [&](std::ostream& o) { json_out(c) ? pgl::write_nonconv_json(o, rows) : pgl::write_nonconv_csv(o, rows); });
      break;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson genericity experiments under biased Bernoulli product measures"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (default: runtime choice)")->check(CLI::NonNegativeNumber);

  Flags f;
  struct Sub {
    pgl::Mode mode;
    CLI::App* app;
    Bound bound;
  };
  std::vector<Sub> subs;
  const std::pair<pgl::Mode, const char*> modes[] = {
      {pgl::Mode::Quenched, "one record per (schedule, k, seed): quenched law of M_k and TV to Po(1)"},
      {pgl::Mode::Annealed, "average of quenched laws over --trials sequences per k"},
      {pgl::Mode::Bounds, "Chen-Stein terms A_k, B_k, C_k per k"},
      {pgl::Mode::Nonconv, "tail-set mass, hit estimates and P(M_k = 0) per k"}};
  for (const auto& [mode, help] : modes) {
    CLI::App* sub = app.add_subcommand(std::string(pgl::to_string(mode)), help);
    subs.push_back({mode, sub, add_common(sub, f)});
  }

  CLI::App* run = app.add_subcommand("run", "every mode listed under \"modes\" in the config file");
  std::string run_config;
  run->add_option("config", run_config, "JSON config")->required()->check(CLI::ExistingFile);

  CLI::App* info = app.add_subcommand("schedule-info", "validation, Kakutani class, Cesaro averages, gamma samples");
  std::string info_spec;
  info->add_option("spec", info_spec, "schedule spec")->required();

  CLI::App* self = app.add_subcommand("selftest", "fast internal consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }
  pgl::parallel::set_threads(threads);

  try {
    if (*info) {
      const auto report = pgl::schedule_info(info_spec);
      pgl::print_schedule_info(std::cout, report);
      return report.validation.ok() ? 0 : kExitUsage;
    }
    if (*self) {
      const auto failures = pgl::selftest();
      for (const auto& msg : failures) std::cout << "FAIL " << msg << '\n';
      std::cout << (failures.empty() ? "selftest: all checks passed\n" : "selftest: failures\n");
      return failures.empty() ? 0 : kExitResource;
    }
    if (*run) {
      std::ifstream in(run_config);
      nlohmann::json j;
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw pgl::DomainError("config " + run_config + ": " + e.what());
      }
      const auto c = pgl::config_from_json(j);
      if (c.modes.size() > 1 && !c.out_path.empty()) {
        // One file per mode: <out>.<mode>.
        for (pgl::Mode m : c.modes) {
          auto cm = c;
          cm.out_path = c.out_path + "." + std::string(pgl::to_string(m));
          run_mode(m, cm);
        }
      } else {
        for (pgl::Mode m : c.modes) run_mode(m, c);
      }
      return 0;
    }
    for (const auto& s : subs) {
      if (*s.app) run_mode(s.mode, build_config(f, s.bound));
    }
  } catch (const pgl::ParseError& e) {
    std::cerr << "pgl: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pgl::DomainError& e) {
    std::cerr << "pgl: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "pgl: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "pgl: config: " << e.what() << '\n';
    return kExitUsage;
  } catch (const pgl::ResourceError& e) {
    std::cerr << "pgl: " << e.what() << '\n';
    return kExitResource;
  } catch (const pgl::CapabilityError& e) {
    std::cerr << "pgl: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::bad_alloc&) {
    std::cerr << "pgl: out of memory\n";
    return kExitResource;
  }
  return 0;
}

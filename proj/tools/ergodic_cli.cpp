// Batch front-end: price-asian, price-european, vol-surface, stationary-stats,
// check-schedule, oracle. Writes CSV; exit 0 ok, 2 config error, 3 numerical failure.

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <locale>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ergodic/config.hpp"
#include "ergodic/engine.hpp"
#include "ergodic/levy.hpp"
#include "ergodic/models.hpp"
#include "ergodic/oracles.hpp"
#include "ergodic/pricing.hpp"
#include "ergodic/schedule.hpp"

using namespace ergodic;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> iters;
  std::optional<std::string> out;
  std::optional<std::string> parity;
  std::optional<unsigned> threads;
  std::vector<std::string> sets;
  bool timing = false;
};

class Csv {
 public:
  Csv() {
    os_.imbue(std::locale::classic());
    os_.precision(12);
  }
  Csv& cell(double v) {
    sep();
    os_ << v;
    return *this;
  }
  Csv& cell(std::size_t v) {
    sep();
    os_ << v;
    return *this;
  }
  Csv& cell(std::uint64_t v, int) {
    sep();
    os_ << v;
    return *this;
  }
  Csv& cell(const std::string& s) {
    sep();
    if (s.find_first_of(",\"\n") == std::string::npos) {
      os_ << s;
    } else {
      os_ << '"';
      for (char c : s) os_ << (c == '"' ? std::string("\"\"") : std::string(1, c));
      os_ << '"';
    }
    return *this;
  }
  Csv& cell(const char* s) { return cell(std::string(s)); }
  void end() {
    os_ << '\n';
    first_ = true;
  }
  std::string str() const { return os_.str(); }

 private:
  void sep() {
    if (!first_) os_ << ',';
    first_ = false;
  }
  std::ostringstream os_;
  bool first_ = true;
};

void emit(const RunConfig& cfg, const Csv& csv) {
  if (cfg.output == "-") {
    std::cout << csv.str();
    std::cout.flush();
    return;
  }
  std::ofstream f(cfg.output, std::ios::binary);
  if (!f) throw ConfigError("output", "cannot open '" + cfg.output + "' for writing");
  f << csv.str();
}

RunConfig build_config(const Flags& flags) {
  RunConfig cfg;
  if (!flags.config.empty()) load_config_file(flags.config, cfg);
  for (const std::string& kv : flags.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set", "expected key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.iters) cfg.set("iters", *flags.iters);
  if (flags.out) cfg.output = *flags.out;
  if (flags.parity) cfg.set("parity", *flags.parity);
  if (flags.threads) cfg.threads = *flags.threads;
  cfg.validate();
  if (cfg.model == ModelKind::Heston) {
    for (const std::string& w : cfg.heston.warnings()) std::cerr << "warning: " << w << '\n';
  }
  return cfg;
}

// Runs fn(row) for row in [0, rows) on cfg.threads workers; results land in
// row order, so the output does not depend on the thread count.
template <class Result>
std::vector<Result> fan_out(std::size_t rows, unsigned threads, const std::function<Result(std::size_t)>& fn) {
  std::vector<Result> out(rows);
  std::vector<std::exception_ptr> errors(rows);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < rows; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(rows)));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < t; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

struct GridPoint {
  double maturity;
  double strike;
};

std::vector<GridPoint> grid(const RunConfig& cfg) {
  std::vector<GridPoint> g;
  for (double t : cfg.maturities) {
    for (double k : cfg.strikes) g.push_back({t, k});
  }
  return g;
}

struct PriceRow {
  PriceEstimate est;
  double seconds = 0.0;
};

template <class Fn>
void with_model(const RunConfig& cfg, Fn&& fn) {
  if (cfg.model == ModelKind::Heston) {
    fn(HestonModel{cfg.heston});
  } else {
    fn(BnsModel{cfg.bns});
  }
}

std::vector<PriceRow> price_grid(const RunConfig& cfg, bool asian) {
  const std::vector<GridPoint> g = grid(cfg);
  std::vector<PriceRow> rows;
  with_model(cfg, [&](const auto& model) {
    rows = fan_out<PriceRow>(g.size(), cfg.threads, [&](std::size_t i) {
      const auto start = std::chrono::steady_clock::now();
      OptionSpec spec{g[i].strike, g[i].maturity, cfg.kind, cfg.rate()};
      Rng rng(cfg.seed, i);
      PriceRow row;
      row.est = asian ? price_asian(model, cfg.schedule(), spec, cfg.iters, cfg.parity, rng)
                      : price_european(model, cfg.schedule(), spec, cfg.iters, rng, cfg.parity);
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return row;
    });
  });
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::cerr << "T=" << g[i].maturity << " K=" << g[i].strike << ": " << rows[i].seconds << " s\n";
  }
  return rows;
}

int cmd_price(const RunConfig& cfg, const Flags& flags, bool asian) {
  const std::vector<GridPoint> g = grid(cfg);
  const std::vector<PriceRow> rows = price_grid(cfg, asian);
  Csv csv;
  csv.cell("model").cell("kind").cell("maturity").cell("strike").cell("estimate").cell("std_error").cell("n").cell(
      "seed");
  if (flags.timing) csv.cell("wall_time_s");
  csv.end();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv.cell(to_string(cfg.model)).cell(to_string(cfg.kind)).cell(g[i].maturity).cell(g[i].strike);
    csv.cell(rows[i].est.value).cell(rows[i].est.std_error).cell(rows[i].est.n).cell(cfg.seed, 0);
    if (flags.timing) csv.cell(rows[i].seconds);
    csv.end();
  }
  emit(cfg, csv);
  return 0;
}

int cmd_vol_surface(const RunConfig& cfg, const Flags& flags) {
  RunConfig c = cfg;
  c.kind = OptionKind::Call;
  const std::vector<GridPoint> g = grid(c);
  const std::vector<PriceRow> rows = price_grid(c, false);
  Csv csv;
  csv.cell("maturity").cell("strike").cell("price").cell("std_error").cell("implied_vol").cell("status");
  if (flags.timing) csv.cell("wall_time_s");
  csv.end();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv.cell(g[i].maturity).cell(g[i].strike).cell(rows[i].est.value).cell(rows[i].est.std_error);
    try {
      csv.cell(implied_vol(rows[i].est.value, c.s0(), g[i].strike, g[i].maturity, c.rate())).cell("ok");
    } catch (const BandViolation&) {
      csv.cell("").cell("band_violation");
    }
    if (flags.timing) csv.cell(rows[i].seconds);
    csv.end();
  }
  emit(c, csv);
  return 0;
}

template <std::size_t D>
void stats_rows(Csv& csv, std::size_t n, const MarginalAccumulator<D>& acc, std::size_t coord) {
  const MarginalStats<D> st = acc.stats();
  csv.cell(n).cell("mean").cell("").cell("").cell(st.mean[coord]).end();
  csv.cell(n).cell("variance").cell("").cell("").cell(st.variance[coord]).end();
  csv.cell(n).cell("skewness").cell("").cell("").cell(st.skewness[coord]).end();
  const Histogram& h = st.histograms[coord];
  const double total = h.total();
  csv.cell(n).cell("underflow").cell("").cell(h.lo).cell(h.underflow / total).end();
  for (std::size_t b = 0; b < h.mass.size(); ++b) {
    const double hi = b + 1 == h.mass.size() ? h.hi : h.bin_lo(b + 1);
    csv.cell(n).cell("mass").cell(h.bin_lo(b)).cell(hi).cell(h.mass[b] / total).end();
  }
  csv.cell(n).cell("overflow").cell(h.hi).cell("").cell(h.overflow / total).end();
}

int cmd_stationary_stats(const RunConfig& cfg) {
  Csv csv;
  csv.cell("n").cell("quantity").cell("bin_lo").cell("bin_hi").cell("value").end();
  Schedule sched = cfg.schedule();
  with_model(cfg, [&](const auto& model) {
    using M = std::decay_t<decltype(model)>;
    constexpr std::size_t D = M::kDim;
    const std::size_t coord = cfg.model == ModelKind::Heston ? 0 : 1;
    State<D> lo, hi;
    lo.fill(-1e300);
    hi.fill(1e300);
    lo[coord] = cfg.stats_lo;
    hi[coord] = cfg.stats_hi;
    MarginalAccumulator<D> acc(cfg.stats_bins, lo, hi);
    auto driver = model.make_driver(Rng(cfg.seed, 0));
    marginal_run<D>(driver, sched, model.initial_state(), cfg.iters, acc,
                    [&](std::size_t n, const MarginalAccumulator<D>& a) { stats_rows(csv, n, a, coord); });
  });
  emit(cfg, csv);
  return 0;
}

int cmd_check_schedule(const RunConfig& cfg) {
  Schedule sched = cfg.schedule();
  std::vector<Diagnostic> out;
  out.push_back(check_weight_step_condition(sched, cfg.check_eps, cfg.check_limit));
  out.push_back(check_invariance_condition(sched, cfg.check_limit));
  try {
    out.push_back(
        check_series_condition(sched, cfg.check_s, cfg.check_eps, cfg.maturities.front(), cfg.check_limit));
  } catch (const std::domain_error& e) {
    throw ConfigError("schedule", e.what());
  }
  Csv csv;
  csv.cell("condition").cell("verdict").cell("observed").cell("scan_limit").cell("detail").end();
  for (const Diagnostic& d : out) {
    csv.cell(d.name).cell(to_string(d.verdict)).cell(d.observed).cell(d.scan_limit).cell(d.detail).end();
  }
  emit(cfg, csv);
  return 0;
}

int cmd_oracle(const RunConfig& cfg) {
  Csv csv;
  switch (cfg.oracle) {
    case OracleKind::Cir: {
      if (cfg.model != ModelKind::Heston) throw ConfigError("oracle.kind", "cir oracle needs model = heston");
      csv.cell("maturity").cell("strike").cell("estimate").cell("std_error").cell("paths").cell("seed").end();
      for (const GridPoint& p : grid(cfg)) {
        OptionSpec spec{p.strike, p.maturity, cfg.kind, cfg.heston.r};
        const PriceEstimate e =
            cir_direct_stationary_price(cfg.heston, spec, cfg.oracle_paths, cfg.oracle_step(spec.maturity), cfg.seed,
                                        cfg.threads);
        csv.cell(p.maturity).cell(p.strike).cell(e.value).cell(e.std_error).cell(e.n).cell(cfg.seed, 0).end();
      }
      break;
    }
    case OracleKind::Ou: {
      const OuReport r = ou_stationary_check(cfg.oracle_sigma, cfg.schedule(), cfg.iters, cfg.seed);
      csv.cell("sigma").cell("n").cell("mean").cell("variance").cell("skewness").cell("target_variance").end();
      csv.cell(cfg.oracle_sigma).cell(r.n).cell(r.mean).cell(r.variance).cell(r.skewness).cell(r.target_variance).end();
      break;
    }
    case OracleKind::Levy: {
      const TemperedStableMeasure& m = cfg.bns.jump;
      csv.cell("u").cell("order").cell("tail_oracle").cell("head_oracle").cell("tail_module").cell("head_module").end();
      for (double u : cfg.oracle_thresholds) {
        for (int order = 1; order <= 2; ++order) {
          const LevyMoments o = levy_moment_oracle(m, u, order);
          csv.cell(u).cell(static_cast<std::size_t>(order)).cell(o.tail).cell(o.head);
          csv.cell(tail_moment(m, u, order)).cell(head_moment(m, u, order)).end();
        }
      }
      break;
    }
  }
  emit(cfg, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ergodic Monte Carlo pricing under stationary stochastic volatility"};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "key=value configuration file");
    sub->add_option("--seed", flags.seed, "64-bit seed");
    sub->add_option("--iters", flags.iters, "iterations per estimate (e.g. 500000 or 5e5)");
    sub->add_option("--out", flags.out, "output CSV path, '-' for stdout");
    sub->add_option("--parity", flags.parity, "on|off: call-put parity variance reduction");
    sub->add_option("--threads", flags.threads, "worker threads");
    sub->add_option("--set", flags.sets, "extra key=value overrides")->allow_extra_args(false);
    sub->add_flag("--timing", flags.timing, "append a wall_time_s column");
    return sub;
  };

  auto* asian = add_common(app.add_subcommand("price-asian", "Asian option prices over the strike grid"));
  auto* european = add_common(app.add_subcommand("price-european", "European option prices over the strike grid"));
  auto* surface = add_common(app.add_subcommand("vol-surface", "European prices and implied volatilities"));
  auto* stats = add_common(app.add_subcommand("stationary-stats", "moments and histogram of the variance marginal"));
  auto* check = add_common(app.add_subcommand("check-schedule", "schedule condition diagnostics"));
  auto* oracle = add_common(app.add_subcommand("oracle", "independent brute-force checks"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const RunConfig cfg = build_config(flags);
    if (*asian) return cmd_price(cfg, flags, true);
    if (*european) return cmd_price(cfg, flags, false);
    if (*surface) return cmd_vol_surface(cfg, flags);
    if (*stats) return cmd_stationary_stats(cfg);
    if (*check) return cmd_check_schedule(cfg);
    if (*oracle) return cmd_oracle(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return 0;
}

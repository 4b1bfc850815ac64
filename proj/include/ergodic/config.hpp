#pragma once

// Flat key=value run configuration. Keys are listed in config/schema.txt.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ergodic/models.hpp"
#include "ergodic/pricing.hpp"
#include "ergodic/schedule.hpp"

namespace ergodic {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config: " + field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ModelKind { Heston, Bns };
enum class OracleKind { Cir, Ou, Levy };

struct RunConfig {
  ModelKind model = ModelKind::Heston;
  HestonParams heston;
  BnsParams bns;

  double c1 = 1.0, rho1 = 1.0 / 3.0, c2 = 1.0, rho2 = 1.0 / 3.0;

  std::vector<double> strikes{50.0};
  std::vector<double> maturities{1.0};
  OptionKind kind = OptionKind::Call;
  std::size_t iters = 100000;
  std::uint64_t seed = 1;
  bool parity = true;
  unsigned threads = 1;
  std::string output = "-";

  std::size_t stats_bins = 50;
  double stats_lo = 0.0;
  double stats_hi = 0.05;

  OracleKind oracle = OracleKind::Cir;
  std::size_t oracle_paths = 100000;
  double oracle_fine_step = std::numeric_limits<double>::quiet_NaN();  // NaN: 1e-3 T
  double oracle_sigma = 1.0;
  std::vector<double> oracle_thresholds{0.01, 0.1, 1.0};

  double check_eps = 0.1;
  double check_s = 2.0;
  std::size_t check_limit = kDefaultScanLimit;

  // Applies one key; throws ConfigError naming the key on an unknown key or
  // an unparsable value.
  void set(const std::string& key, const std::string& value);

  // Every field against its owner's preconditions; throws ConfigError.
  void validate() const;

  Schedule schedule() const;
  double rate() const { return model == ModelKind::Heston ? heston.r : bns.r; }
  double s0() const { return model == ModelKind::Heston ? heston.s0 : bns.s0; }
  double oracle_step(double maturity) const {
    return std::isnan(oracle_fine_step) ? 1e-3 * maturity : oracle_fine_step;
  }
};

// Reads key=value lines ('#' starts a comment) into cfg.
void load_config_file(const std::string& path, RunConfig& cfg);

// "44,45,46" or "44:56:1" (inclusive range).
std::vector<double> parse_grid(const std::string& field, const std::string& text);

const char* to_string(ModelKind m) noexcept;
const char* to_string(OptionKind k) noexcept;

}  // namespace ergodic

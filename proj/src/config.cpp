#include "ergodic/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

namespace ergodic {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec == std::errc() && ptr != t.data() + t.size()) {
    // Accept integral scientific notation such as 5e5.
    const double d = to_double(field, t);
    if (!(d >= 0.0 && d < 1.8e19 && std::floor(d) == d)) {
      throw ConfigError(field, "expected a non-negative integer, got '" + text + "'");
    }
    return static_cast<std::uint64_t>(d);
  }
  if (ec != std::errc() || t.empty()) throw ConfigError(field, "expected a non-negative integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  if (t == "1" || t == "true" || t == "on" || t == "yes") return true;
  if (t == "0" || t == "false" || t == "off" || t == "no") return false;
  throw ConfigError(field, "expected a boolean, got '" + text + "'");
}

std::vector<double> to_list(const std::string& field, const std::string& text) {
  std::vector<double> out;
  std::string item;
  for (char ch : text + ",") {
    if (ch == ',') {
      if (!trim(item).empty()) out.push_back(to_double(field, item));
      item.clear();
    } else {
      item += ch;
    }
  }
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <class T>
Setter num(T RunConfig::*member) {
  return [member](RunConfig& c, const std::string& k, const std::string& v) {
    if constexpr (std::is_floating_point_v<T>) {
      c.*member = to_double(k, v);
    } else {
      c.*member = static_cast<T>(to_uint(k, v));
    }
  };
}

Setter heston_field(double HestonParams::*member) {
  return [member](RunConfig& c, const std::string& k, const std::string& v) { c.heston.*member = to_double(k, v); };
}

Setter bns_field(double BnsParams::*member) {
  return [member](RunConfig& c, const std::string& k, const std::string& v) { c.bns.*member = to_double(k, v); };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::string t = trim(v);
         if (t == "heston") c.model = ModelKind::Heston;
         else if (t == "bns") c.model = ModelKind::Bns;
         else throw ConfigError(k, "expected heston or bns, got '" + v + "'");
       }},
      {"s0",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.heston.s0 = c.bns.s0 = to_double(k, v);
       }},
      {"r",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.heston.r = c.bns.r = to_double(k, v);
       }},
      {"heston.rho", heston_field(&HestonParams::rho)},
      {"heston.k", heston_field(&HestonParams::k)},
      {"heston.theta", heston_field(&HestonParams::theta)},
      {"heston.sigma_v", heston_field(&HestonParams::sigma_v)},
      {"heston.v_init", heston_field(&HestonParams::v_init)},
      {"heston.y_init", heston_field(&HestonParams::y_init)},
      {"bns.rho", bns_field(&BnsParams::rho)},
      {"bns.mu", bns_field(&BnsParams::mu)},
      {"bns.x_init", bns_field(&BnsParams::x_init)},
      {"bns.v_init", bns_field(&BnsParams::v_init)},
      {"bns.c", [](RunConfig& c, const std::string& k, const std::string& v) { c.bns.jump.c = to_double(k, v); }},
      {"bns.lambda",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.bns.jump.lambda = to_double(k, v); }},
      {"bns.alpha",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.bns.jump.alpha = to_double(k, v); }},
      {"bns.truncation_scale",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.bns.truncation.scale = to_double(k, v); }},
      {"bns.truncation_power",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.bns.truncation.power = to_double(k, v); }},
      {"bns.scheme",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::string t = trim(v);
         if (t == "poisson") c.bns.scheme = JumpScheme::Poisson;
         else if (t == "wienerized") c.bns.scheme = JumpScheme::Wienerized;
         else throw ConfigError(k, "expected poisson or wienerized, got '" + v + "'");
       }},
      {"bns.compensate",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.bns.compensate = to_bool(k, v); }},
      {"schedule.c1", num(&RunConfig::c1)},
      {"schedule.rho1", num(&RunConfig::rho1)},
      {"schedule.c2", num(&RunConfig::c2)},
      {"schedule.rho2", num(&RunConfig::rho2)},
      {"strikes",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.strikes = parse_grid(k, v); }},
      {"maturities",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.maturities = parse_grid(k, v); }},
      {"kind",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::string t = trim(v);
         if (t == "call") c.kind = OptionKind::Call;
         else if (t == "put") c.kind = OptionKind::Put;
         else throw ConfigError(k, "expected call or put, got '" + v + "'");
       }},
      {"iters", num(&RunConfig::iters)},
      {"seed", num(&RunConfig::seed)},
      {"parity", [](RunConfig& c, const std::string& k, const std::string& v) { c.parity = to_bool(k, v); }},
      {"threads", num(&RunConfig::threads)},
      {"output", [](RunConfig& c, const std::string&, const std::string& v) { c.output = trim(v); }},
      {"stats.bins", num(&RunConfig::stats_bins)},
      {"stats.lo", num(&RunConfig::stats_lo)},
      {"stats.hi", num(&RunConfig::stats_hi)},
      {"oracle.kind",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::string t = trim(v);
         if (t == "cir") c.oracle = OracleKind::Cir;
         else if (t == "ou") c.oracle = OracleKind::Ou;
         else if (t == "levy") c.oracle = OracleKind::Levy;
         else throw ConfigError(k, "expected cir, ou or levy, got '" + v + "'");
       }},
      {"oracle.paths", num(&RunConfig::oracle_paths)},
      {"oracle.fine_step", num(&RunConfig::oracle_fine_step)},
      {"oracle.sigma", num(&RunConfig::oracle_sigma)},
      {"oracle.thresholds",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.oracle_thresholds = to_list(k, v); }},
      {"check.eps", num(&RunConfig::check_eps)},
      {"check.s", num(&RunConfig::check_s)},
      {"check.limit", num(&RunConfig::check_limit)},
  };
  return table;
}

template <class Fn>
void owned_by(const std::string& field, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace

std::vector<double> parse_grid(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  if (t.find(':') == std::string::npos) return to_list(field, t);
  std::vector<std::string> parts{""};
  for (char ch : t) {
    if (ch == ':') parts.emplace_back();
    else parts.back() += ch;
  }
  if (parts.size() != 3) throw ConfigError(field, "range must look like lo:hi:step");
  const double lo = to_double(field, parts[0]);
  const double hi = to_double(field, parts[1]);
  const double step = to_double(field, parts[2]);
  if (!(step > 0.0) || !(hi >= lo)) throw ConfigError(field, "range needs step > 0 and hi >= lo");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 100000) throw ConfigError(field, "range has too many points");
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, "unknown key");
  it->second(*this, key, value);
}

void RunConfig::validate() const {
  if (model == ModelKind::Heston) {
    owned_by("heston", [&] { heston.validate(); });
  } else {
    owned_by("bns", [&] { bns.validate(); });
  }
  owned_by("schedule", [&] { (void)schedule(); });
  if (strikes.empty()) throw ConfigError("strikes", "empty grid");
  if (maturities.empty()) throw ConfigError("maturities", "empty grid");
  for (double k : strikes) {
    if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError("strikes", "every strike must be positive");
  }
  for (double t : maturities) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("maturities", "every maturity must be positive");
  }
  if (iters == 0) throw ConfigError("iters", "must be positive");
  if (threads == 0) throw ConfigError("threads", "must be positive");
  if (output.empty()) throw ConfigError("output", "empty path");
  if (stats_bins == 0) throw ConfigError("stats.bins", "must be positive");
  if (!(stats_hi > stats_lo)) throw ConfigError("stats.hi", "must exceed stats.lo");
  if (oracle_paths == 0) throw ConfigError("oracle.paths", "must be positive");
  for (double t : maturities) {
    if (!(oracle_step(t) > 0.0 && oracle_step(t) <= 1e-3 * t)) {
      throw ConfigError("oracle.fine_step", "must lie in (0, 1e-3 T] for every maturity");
    }
  }
  if (!(oracle_sigma >= 0.0)) throw ConfigError("oracle.sigma", "must be non-negative");
  for (double u : oracle_thresholds) {
    if (!(u > 0.0)) throw ConfigError("oracle.thresholds", "every threshold must be positive");
  }
  if (!(check_eps > 0.0 && check_eps < 1.0)) throw ConfigError("check.eps", "must lie in (0,1)");
  if (!(check_s > 1.0)) throw ConfigError("check.s", "must exceed 1");
  if (check_limit == 0) throw ConfigError("check.limit", "must be positive");
}

Schedule RunConfig::schedule() const { return Schedule::polynomial(c1, rho1, c2, rho2); }

void load_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno), "expected key = value");
    }
    cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
  }
}

const char* to_string(ModelKind m) noexcept { return m == ModelKind::Heston ? "heston" : "bns"; }

const char* to_string(OptionKind k) noexcept { return k == OptionKind::Call ? "call" : "put"; }

}  // namespace ergodic

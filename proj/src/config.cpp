#include "mhdlab/config.hpp"

#include "mhdlab/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace mhdlab {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void reject(const std::string& key, const std::string& msg) { throw ConfigError(key, key + ": " + msg); }

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x))
    reject(key, "expected a number, got '" + v + "'");
  return x;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size()) reject(key, "expected an integer, got '" + v + "'");
  return x;
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace

void validate(const RunConfig& c) {
  const Params& p = c.params;
  if (c.d != 2) reject("d", "only d = 2 is supported (the 3D schemes are not implemented)");
  if (c.n < 2) reject("n", "must be at least 2");
  if (!(p.mu > 0.0)) reject("mu", "must be positive");
  if (!(p.lambda >= 0.0)) reject("lambda", "must be nonnegative");
  if (!(p.alpha > 0.0)) reject("alpha", "must be positive");
  if (!(p.a > 0.0)) reject("a", "must be positive");
  if (!(p.gamma > 1.0)) reject("gamma", "must exceed 1");
  if (!(p.T > 0.0)) reject("T", "must be positive");
  if (!(c.dt_over_h >= 0.1 && c.dt_over_h <= 10.0)) reject("dt_over_h", "must lie in [0.1, 10]");
  if (c.stride < 1) reject("stride", "must be at least 1");
  if (const auto v = validate_epsilon(p.gamma, c.d, p.epsilon, c.variant)) reject("epsilon", *v);
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), c.scenario) == names.end()) {
    std::string known;
    for (const auto& s : names) known += (known.empty() ? "" : ", ") + s;
    reject("scenario", "unknown scenario '" + c.scenario + "' (known: " + known + ")");
  }
  if (c.variant == Variant::scheme1 && c.scenario == "orszag-tang-like")
    reject("scenario", "orszag-tang-like needs the periodic mesh of scheme2");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig c;
  Params& p = c.params;
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters = {
      {"variant",
       [&](const std::string& k, const std::string& v) {
         if (v == "scheme1") c.variant = Variant::scheme1;
         else if (v == "scheme2") c.variant = Variant::scheme2;
         else reject(k, "expected scheme1 or scheme2, got '" + v + "'");
       }},
      {"d", [&](const std::string& k, const std::string& v) { c.d = static_cast<int>(to_integer(k, v)); }},
      {"n",
       [&](const std::string& k, const std::string& v) {
         const long long n = to_integer(k, v);
         if (n < 2 || n > 4096) reject(k, "must lie in [2, 4096]");
         c.n = static_cast<int>(n);
       }},
      {"scenario", [&](const std::string&, const std::string& v) { c.scenario = v; }},
      {"mu", [&](const std::string& k, const std::string& v) { p.mu = to_double(k, v); }},
      {"lambda", [&](const std::string& k, const std::string& v) { p.lambda = to_double(k, v); }},
      {"alpha", [&](const std::string& k, const std::string& v) { p.alpha = to_double(k, v); }},
      {"a", [&](const std::string& k, const std::string& v) { p.a = to_double(k, v); }},
      {"gamma", [&](const std::string& k, const std::string& v) { p.gamma = to_double(k, v); }},
      {"epsilon", [&](const std::string& k, const std::string& v) { p.epsilon = to_double(k, v); }},
      {"dt_over_h", [&](const std::string& k, const std::string& v) { c.dt_over_h = to_double(k, v); }},
      {"T", [&](const std::string& k, const std::string& v) { p.T = to_double(k, v); }},
      {"out",
       [&](const std::string& k, const std::string& v) {
         if (v.empty()) reject(k, "must not be empty");
         c.out = v;
       }},
      {"stride",
       [&](const std::string& k, const std::string& v) {
         const long long s = to_integer(k, v);
         if (s < 1 || s > std::numeric_limits<int>::max()) reject(k, "must be a positive integer");
         c.stride = static_cast<int>(s);
       }},
      {"seed",
       [&](const std::string& k, const std::string& v) {
         std::uint64_t s = 0;
         const auto [q, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
         if (ec != std::errc() || q != v.data() + v.size()) reject(k, "expected an unsigned 64-bit integer, got '" + v + "'");
         c.seed = s;
       }},
  };

  std::set<std::string> seen;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError("", where + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(key, where + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(key, where + ": duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(key, where + ": " + key + ": missing value");
    try {
      it->second(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(key, where + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

double mesh_size(const RunConfig& c, int n) { return c.d == 2 ? std::sqrt(2.0) / n : std::sqrt(3.0) / n; }

Params params_for(const RunConfig& c, int n) {
  Params p = c.params;
  p.d = c.d;
  p.h = mesh_size(c, n);
  p.dt = c.dt_over_h * p.h;
  return p;
}

void write_config(std::ostream& os, const RunConfig& c) {
  const Params& p = c.params;
  os << "variant = " << to_string(c.variant) << "\n"
     << "d = " << c.d << "\n"
     << "n = " << c.n << "\n"
     << "scenario = " << c.scenario << "\n"
     << "mu = " << fmt(p.mu) << "\n"
     << "lambda = " << fmt(p.lambda) << "\n"
     << "alpha = " << fmt(p.alpha) << "\n"
     << "a = " << fmt(p.a) << "\n"
     << "gamma = " << fmt(p.gamma) << "\n"
     << "epsilon = " << fmt(p.epsilon) << "\n"
     << "dt_over_h = " << fmt(c.dt_over_h) << "\n"
     << "T = " << fmt(p.T) << "\n"
     << "out = " << c.out << "\n"
     << "stride = " << c.stride << "\n"
     << "seed = " << c.seed << "\n";
}

}  // namespace mhdlab

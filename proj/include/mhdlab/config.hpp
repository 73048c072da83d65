// Run configuration: flat "key = value" files with '#' comments.
//
// Keys and defaults:
//   variant    scheme2          scheme1 | scheme2
//   d          2                only 2 is supported
//   n          8                cells per direction, >= 2
//   scenario   smooth-periodic  constant | smooth-periodic | perturbed-constant | orszag-tang-like
//   mu 0.1, lambda 0, alpha 0.1, a 1, gamma 2, epsilon 1
//   dt_over_h  1                in [0.1, 10]
//   T          0.1
//   out        out
//   stride     1                every stride-th state goes to fields_<k>.csv
//   seed       0                drives the randomized identity checks of `check`

#ifndef MHDLAB_CONFIG_HPP
#define MHDLAB_CONFIG_HPP

#include "mhdlab/numerics.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace mhdlab {

struct RunConfig {
  Variant variant = Variant::scheme2;
  int d = 2;
  int n = 8;
  std::string scenario = "smooth-periodic";
  Params params;  // dt and h are filled in from n and dt_over_h by params_for()
  double dt_over_h = 1.0;
  std::string out = "out";
  int stride = 1;
  std::uint64_t seed = 0;
};

/// Rejection of a configuration; key() names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what) : std::invalid_argument(what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Parses and validates; `source` prefixes line numbers in messages.
RunConfig parse_config(std::istream& in, const std::string& source = "config");
RunConfig parse_config_file(const std::string& path);
/// Re-checks cross-key constraints after command-line overrides.
void validate(const RunConfig& c);

/// Mesh size of the configured mesh and the derived step parameters.
double mesh_size(const RunConfig& c, int n);
Params params_for(const RunConfig& c, int n);

/// Canonical "key = value" dump, parseable by parse_config.
void write_config(std::ostream& os, const RunConfig& c);

}  // namespace mhdlab

#endif  // MHDLAB_CONFIG_HPP

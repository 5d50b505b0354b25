#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace symplattice::cli {

// Flat dotted-key configuration. Values stay strings until a command reads
// them; every typed read records the resolved value (defaults included) so the
// report can echo the complete configuration.
class Config {
 public:
  // Later sets override earlier ones (flags over file keys).
  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback);
  std::string require_string(const std::string& key);
  double get_double(const std::string& key, double fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback);
  std::uint64_t require_uint(const std::string& key);
  std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback);
  std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback);

  // ValidationError naming the first key no command read
  void reject_unused() const;

  const nlohmann::json& resolved() const { return resolved_; }

 private:
  const std::string* raw(const std::string& key);

  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
  nlohmann::json resolved_ = nlohmann::json::object();
};

// "key = value" per line; '#' starts a comment. Duplicate keys are rejected.
void parse_config_text(std::istream& in, Config& cfg);
void load_config_file(const std::string& path, Config& cfg);

}  // namespace symplattice::cli

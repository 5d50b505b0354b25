#include "config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "symplattice/error.hpp"

namespace symplattice::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
  return true;
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  T v{};
  const char* b = text.data();
  const char* e = b + text.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw ValidationError("cannot parse '" + text + "' for key " + key, key);
  return v;
}

// integers also accept scientific notation such as 1e6 when the value is integral
template <class T>
T parse_integer(const std::string& key, const std::string& text) {
  if (text.find_first_of("eE.") == std::string::npos) return parse_number<T>(key, text);
  const double d = parse_number<double>(key, text);
  const T v = static_cast<T>(d);
  if (static_cast<double>(v) != d) throw ValidationError("expected an integer for key " + key, key);
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(text);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw ValidationError("invalid config key '" + key + "'", key);
  values_[key] = trim(value);
}

const std::string* Config::raw(const std::string& key) {
  used_.insert(key);
  auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) {
  const std::string* r = raw(key);
  std::string v = r ? *r : fallback;
  resolved_[key] = v;
  return v;
}

std::string Config::require_string(const std::string& key) {
  const std::string* r = raw(key);
  if (!r || r->empty()) throw ValidationError("missing required key " + key, key);
  resolved_[key] = *r;
  return *r;
}

double Config::get_double(const std::string& key, double fallback) {
  const std::string* r = raw(key);
  const double v = r ? parse_number<double>(key, *r) : fallback;
  resolved_[key] = v;
  return v;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) {
  const std::string* r = raw(key);
  const std::int64_t v = r ? parse_integer<std::int64_t>(key, *r) : fallback;
  resolved_[key] = v;
  return v;
}

std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) {
  const std::string* r = raw(key);
  if (r && !r->empty() && (*r)[0] == '-') throw ValidationError("key " + key + " must be non-negative", key);
  const std::uint64_t v = r ? parse_integer<std::uint64_t>(key, *r) : fallback;
  resolved_[key] = v;
  return v;
}

std::uint64_t Config::require_uint(const std::string& key) {
  const std::string* r = raw(key);
  if (!r || r->empty()) throw ValidationError("missing required key " + key, key);
  return get_uint(key, 0);
}

std::vector<int> Config::get_int_list(const std::string& key, const std::vector<int>& fallback) {
  const std::string* r = raw(key);
  std::vector<int> v;
  if (r) {
    for (const auto& item : split_list(*r)) v.push_back(parse_integer<int>(key, item));
    if (v.empty()) throw ValidationError("key " + key + " must list at least one value", key);
  } else {
    v = fallback;
  }
  resolved_[key] = v;
  return v;
}

std::vector<double> Config::get_double_list(const std::string& key, const std::vector<double>& fallback) {
  const std::string* r = raw(key);
  std::vector<double> v;
  if (r) {
    for (const auto& item : split_list(*r)) v.push_back(parse_number<double>(key, item));
    if (v.empty()) throw ValidationError("key " + key + " must list at least one value", key);
  } else {
    v = fallback;
  }
  resolved_[key] = v;
  return v;
}

void Config::reject_unused() const {
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) throw ValidationError("unknown key " + k + " for this command", k);
}

void parse_config_text(std::istream& in, Config& cfg) {
  std::string line;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + " is not 'key = value'", "config");
    const std::string key = trim(line.substr(0, eq));
    if (!seen.insert(key).second) throw ValidationError("duplicate config key " + key, key);
    cfg.set(key, line.substr(eq + 1));
  }
}

void load_config_file(const std::string& path, Config& cfg) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path, "config");
  parse_config_text(in, cfg);
}

}  // namespace symplattice::cli

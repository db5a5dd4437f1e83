#include "dspde/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "dspde/errors.hpp"

namespace dspde {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

KvConfig KvConfig::from_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file: " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return from_text(ss.str(), path);
}

KvConfig KvConfig::from_text(const std::string& text, const std::string& origin) {
  KvConfig cfg;
  cfg.origin_ = origin;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key=value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
    if (cfg.entries_.count(key))
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": duplicate key '" +
                        key + "'");
    cfg.entries_[key] = Entry{value, line_no, false};
  }
  return cfg;
}

void KvConfig::set(const std::string& key, const std::string& value) {
  entries_[key] = Entry{value, 0, false};
}

const KvConfig::Entry* KvConfig::find(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

KvConfig::Entry* KvConfig::find(const std::string& key) {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

bool KvConfig::has(const std::string& key) const { return find(key) != nullptr; }

void KvConfig::record(const std::string& key, const std::string& final_value) {
  resolved_[key] = final_value;
}

std::string KvConfig::get_string(const std::string& key, const std::string& def) {
  Entry* e = find(key);
  std::string v = def;
  if (e) {
    e->consumed = true;
    v = e->value;
  }
  record(key, v);
  return v;
}

double KvConfig::get_double(const std::string& key, double def) {
  Entry* e = find(key);
  double v = def;
  if (e) {
    e->consumed = true;
    try {
      std::size_t pos = 0;
      v = std::stod(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': not a number: '" + e->value + "'");
    }
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  record(key, buf);
  return v;
}

int KvConfig::get_int(const std::string& key, int def) {
  Entry* e = find(key);
  long long v = def;
  if (e) {
    e->consumed = true;
    try {
      std::size_t pos = 0;
      v = std::stoll(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': not an integer: '" + e->value + "'");
    }
  }
  record(key, std::to_string(v));
  return static_cast<int>(v);
}

std::uint64_t KvConfig::get_u64(const std::string& key, std::uint64_t def) {
  Entry* e = find(key);
  std::uint64_t v = def;
  if (e) {
    e->consumed = true;
    try {
      std::size_t pos = 0;
      v = std::stoull(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "': not an unsigned integer: '" +
                        e->value + "'");
    }
  }
  record(key, std::to_string(v));
  return v;
}

bool KvConfig::get_bool(const std::string& key, bool def) {
  Entry* e = find(key);
  bool v = def;
  if (e) {
    e->consumed = true;
    const std::string& s = e->value;
    if (s == "1" || s == "true" || s == "yes" || s == "on")
      v = true;
    else if (s == "0" || s == "false" || s == "no" || s == "off")
      v = false;
    else
      throw ConfigError("config key '" + key + "': not a boolean: '" + s + "'");
  }
  record(key, v ? "1" : "0");
  return v;
}

std::vector<double> KvConfig::get_doubles(const std::string& key,
                                          std::vector<double> def) {
  Entry* e = find(key);
  std::vector<double> v = std::move(def);
  if (e) {
    e->consumed = true;
    v.clear();
    std::istringstream is(e->value);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      try {
        v.push_back(std::stod(trim(tok)));
      } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': not a number list: '" + e->value +
                          "'");
      }
    }
  }
  std::string joined;
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", v[i]);
    if (i) joined += ',';
    joined += buf;
  }
  record(key, joined);
  return v;
}

void KvConfig::finalize() const {
  std::string bad;
  for (const auto& [key, e] : entries_) {
    if (e.consumed) continue;
    if (!bad.empty()) bad += ", ";
    bad += "'" + key + "'";
    if (e.line > 0) bad += " (" + origin_ + ":" + std::to_string(e.line) + ")";
  }
  if (!bad.empty()) throw ConfigError("unknown config keys: " + bad);
}

std::string KvConfig::resolved_text() const {
  std::string out;
  for (const auto& [key, value] : resolved_) out += key + "=" + value + "\n";
  return out;
}

}  // namespace dspde

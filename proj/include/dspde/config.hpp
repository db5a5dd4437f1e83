#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dspde {

// Plain key=value configuration ('#' comments, blank lines ignored). Every
// getter consumes its key; finalize() rejects keys nobody asked for, so
// typos fail loudly instead of silently running defaults.
class KvConfig {
public:
  KvConfig() = default;
  static KvConfig from_file(const std::string& path);
  static KvConfig from_text(const std::string& text, const std::string& origin);

  // command-line override, wins over the file
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& def);
  double get_double(const std::string& key, double def);
  int get_int(const std::string& key, int def);
  std::uint64_t get_u64(const std::string& key, std::uint64_t def);
  bool get_bool(const std::string& key, bool def);
  // comma-separated doubles
  std::vector<double> get_doubles(const std::string& key, std::vector<double> def);

  void finalize() const;  // throws ConfigError on unconsumed keys

  // key=value lines, sorted by key, of everything consumed with its final
  // value (defaults included): the resolved configuration of a run
  std::string resolved_text() const;

private:
  struct Entry {
    std::string value;
    int line = 0;
    bool consumed = false;
  };
  const Entry* find(const std::string& key) const;
  Entry* find(const std::string& key);
  void record(const std::string& key, const std::string& final_value);

  std::string origin_;
  std::map<std::string, Entry> entries_;
  std::map<std::string, std::string> resolved_;
};

}  // namespace dspde

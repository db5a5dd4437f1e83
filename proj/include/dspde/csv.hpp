#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "dspde/errors.hpp"

namespace dspde {

// CSV with '#' comment lines, one header row, LF endings, and full-precision
// doubles, so identical runs produce byte-identical files.
class CsvWriter {
public:
  explicit CsvWriter(const std::string& path) : os_(path, std::ios::binary) {
    if (!os_) throw IoError("cannot open for writing: " + path);
  }

  void comment(const std::string& text) { os_ << "# " << text << '\n'; }

  void header(const std::vector<std::string>& cols) { write_row(cols); }

  void row(const std::vector<std::string>& cols) { write_row(cols); }

  void row(const std::vector<double>& values) {
    std::vector<std::string> cols;
    cols.reserve(values.size());
    for (double v : values) cols.push_back(format(v));
    write_row(cols);
  }

  static std::string format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

private:
  void write_row(const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) os_ << ',';
      os_ << cols[i];
    }
    os_ << '\n';
    if (!os_) throw IoError("write failed");
  }

  std::ofstream os_;
};

}  // namespace dspde

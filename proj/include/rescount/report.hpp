#pragma once

#include <string>
#include <vector>

#include "rescount/common.hpp"

namespace rescount {

// %.17g: shortest text that round-trips an IEEE double exactly.
std::string fmt_double(double x);

struct CsvWriter {
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  void row_numeric(const std::vector<double>& cells);
  const std::string& text() const { return buf_; }

 private:
  std::string buf_;
  size_t ncols_;
};

// Writes content and records (path, fnv1a-64 content hash) for the manifest.
class OutputDir {
 public:
  explicit OutputDir(std::string root);
  void write(const std::string& relpath, const std::string& content);
  // Emits manifest.txt: one "hash  relpath" line per file, sorted.
  void finalize();

 private:
  std::string root_;
  std::vector<std::pair<std::string, std::string>> entries_;
};

uint64_t fnv1a64(const std::string& data);

}  // namespace rescount

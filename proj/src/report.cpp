#include "rescount/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace rescount {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : ncols_(header.size()) {
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += header[i];
  }
  buf_ += '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != ncols_) throw error("CsvWriter: column count mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += cells[i];
  }
  buf_ += '\n';
}

void CsvWriter::row_numeric(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double c : cells) s.push_back(fmt_double(c));
  row(s);
}

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

OutputDir::OutputDir(std::string root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

void OutputDir::write(const std::string& relpath, const std::string& content) {
  const auto full = std::filesystem::path(root_) / relpath;
  std::filesystem::create_directories(full.parent_path());
  std::ofstream os(full, std::ios::binary);
  if (!os) throw error("OutputDir: cannot open " + full.string());
  os << content;
  char h[20];
  std::snprintf(h, sizeof(h), "%016llx", static_cast<unsigned long long>(fnv1a64(content)));
  entries_.emplace_back(relpath, h);
}

void OutputDir::finalize() {
  std::sort(entries_.begin(), entries_.end());
  std::string manifest;
  for (const auto& [path, hash] : entries_) manifest += hash + "  " + path + "\n";
  std::ofstream os(std::filesystem::path(root_) / "manifest.txt", std::ios::binary);
  os << manifest;
}

}  // namespace rescount

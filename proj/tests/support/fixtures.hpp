#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsrl/dataset.hpp"

namespace test_support {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& label) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("fsrl_test_" + label + "_" + std::to_string(counter.fetch_add(1)) + "_" +
             std::to_string(::getpid()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("test fixture: cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("test fixture: cannot write " + path);
}

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("test fixture: cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Dataset from feature columns; labels must be -1/+1.
inline fsrl::Dataset from_columns(const std::vector<std::vector<double>>& columns,
                                  const std::vector<int>& labels) {
  fsrl::Dataset data;
  const std::size_t n = labels.size();
  const std::size_t d = columns.size();
  data.features = fsrl::Matrix(n, d);
  for (std::size_t j = 0; j < d; ++j) {
    if (columns[j].size() != n) throw std::runtime_error("test fixture: ragged columns");
    for (std::size_t i = 0; i < n; ++i) data.features(i, j) = columns[j][i];
  }
  data.labels = labels;
  for (std::size_t j = 0; j < d; ++j) data.feature_names.push_back("f" + std::to_string(j));
  fsrl::validate_dataset(data);
  return data;
}

}  // namespace test_support

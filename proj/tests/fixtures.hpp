#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <unistd.h>

#include "ihho.hpp"

namespace fx {

inline ihho::Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                                  std::vector<std::string> class_names = {"neg", "pos"}) {
  ihho::Dataset d;
  for (const auto& r : rows) d.features.append_row(r);
  d.labels = labels;
  for (std::size_t j = 0; j < (rows.empty() ? 0 : rows[0].size()); ++j) d.feature_names.push_back("f" + std::to_string(j));
  d.class_names = std::move(class_names);
  for (std::size_t i = 0; i < rows.size(); ++i) d.row_ids.push_back(i);
  return d;
}

/// Gaussian blobs: class 0 around the origin, class 1 shifted by `shift` on
/// the first axis.
inline ihho::Dataset blobs(std::size_t n0, std::size_t n1, std::size_t p, double shift, std::uint64_t seed) {
  ihho::RngStream rng(seed, 99);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n0 + n1; ++i) {
    std::vector<double> r(p);
    for (auto& v : r) v = rng.normal();
    if (i >= n0) r[0] += shift;
    rows.push_back(r);
    labels.push_back(i >= n0 ? 1 : 0);
  }
  return make_dataset(rows, labels);
}

/// Two interleaved half-moons: 200 majority on the upper moon, 20 minority on
/// the lower moon, then 3 minority outliers far from both (rows 220..222).
inline ihho::Dataset two_moons_with_outliers() {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (int i = 0; i < 200; ++i) {
    const double t = std::numbers::pi * i / 199.0;
    rows.push_back({std::cos(t), std::sin(t)});
    labels.push_back(0);
  }
  for (int i = 0; i < 20; ++i) {
    const double t = std::numbers::pi * i / 19.0;
    rows.push_back({1.0 - std::cos(t), 0.5 - std::sin(t)});
    labels.push_back(1);
  }
  rows.push_back({6.0, 6.0});
  rows.push_back({-6.0, 5.0});
  rows.push_back({4.0, -6.0});
  labels.insert(labels.end(), {1, 1, 1});
  return make_dataset(rows, labels, {"major", "minor"});
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("ihho_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace fx

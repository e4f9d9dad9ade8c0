#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dataset.hpp"

namespace scp {

enum class QueryRowPolicy {
  LastRowUnlabeled,  // the last row must have an empty response cell
  HeldOutIndex,      // row `index` (1-based, data rows only) becomes the query
  RandomWithSeed,    // one row drawn uniformly with `seed`
};

struct CsvOptions {
  QueryRowPolicy policy = QueryRowPolicy::LastRowUnlabeled;
  std::size_t index = 0;
  std::uint64_t seed = 0;
  // Header name or 1-based column number; empty selects the last column.
  std::string response;
};

struct CsvDataset {
  Dataset data;
  Eigen::VectorXd x_new;
  std::optional<double> y_new;  // retained when the query row was labeled
  std::size_t query_row = 0;    // 1-based data row
  std::vector<std::string> feature_names;
  std::string response_name;
};

CsvDataset parse_dataset_csv(const std::string& path, const CsvOptions& options = {});
CsvDataset parse_dataset_csv_text(const std::string& text, const CsvOptions& options = {});

// Full table with every response present (for the path subcommand).
Dataset parse_labeled_csv_text(const std::string& text, const std::string& response = {});
Dataset parse_labeled_csv(const std::string& path, const std::string& response = {});

}  // namespace scp

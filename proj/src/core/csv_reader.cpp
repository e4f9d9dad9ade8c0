#include "csv_reader.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "error.hpp"

namespace scp {

namespace {

constexpr const char* kStage = "parse_dataset_csv";

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// Double-quoted cells may hold commas; "" inside quotes is a literal quote.
std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false, was_quoted = false;
  const auto finish = [&] {
    cells.push_back(was_quoted ? cell : trim(cell));
    cell.clear();
    was_quoted = false;
  };
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cell += c;
      }
    } else if (c == '"' && trim(cell).empty()) {
      quoted = was_quoted = true;
      cell.clear();
    } else if (c == ',') {
      finish();
    } else if (!was_quoted) {
      cell += c;
    }
  }
  finish();
  return cells;
}

std::string location(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based file lines
};

Table read_table(const std::string& text) {
  Table table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw Error(ErrorKind::ParseError, kStage,
                  location(line_number, cells.size()) + ": expected " + std::to_string(table.header.size()) +
                      " cells, found " + std::to_string(cells.size()));
    }
    table.rows.push_back(std::move(cells));
    table.line_numbers.push_back(line_number);
  }
  if (table.header.empty()) throw Error(ErrorKind::ParseError, kStage, "missing header row");
  if (table.header.size() < 2) {
    throw Error(ErrorKind::ParseError, kStage, "need at least one covariate column and one response column");
  }
  return table;
}

std::size_t response_column(const Table& table, const std::string& response) {
  if (response.empty()) return table.header.size() - 1;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == response) return c;
  }
  std::size_t index = 0;
  const auto [ptr, ec] = std::from_chars(response.data(), response.data() + response.size(), index);
  if (ec == std::errc() && ptr == response.data() + response.size() && index >= 1 && index <= table.header.size()) {
    return index - 1;
  }
  throw Error(ErrorKind::MissingResponse, kStage, "no response column named or numbered '" + response + "'");
}

std::optional<double> parse_cell(const std::string& cell, std::size_t line, std::size_t column) {
  if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") return std::nullopt;
  double value = 0.0;
  const char* begin = cell.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    throw Error(ErrorKind::NonNumericCell, kStage, location(line, column) + ": '" + cell + "' is not a finite number");
  }
  return value;
}

struct Parsed {
  Eigen::MatrixXd X;
  std::vector<std::optional<double>> y;
  std::vector<std::string> feature_names;
  std::string response_name;
};

Parsed parse_table(const Table& table, const std::string& response) {
  const std::size_t rc = response_column(table, response);
  Parsed out;
  out.response_name = table.header[rc];
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c != rc) out.feature_names.push_back(table.header[c]);
  }
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto p = static_cast<Eigen::Index>(out.feature_names.size());
  out.X.resize(n, p);
  out.y.resize(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Eigen::Index col = 0;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      const auto value = parse_cell(table.rows[r][c], table.line_numbers[r], c + 1);
      if (c == rc) {
        out.y[r] = value;
        continue;
      }
      if (!value) {
        throw Error(ErrorKind::ParseError, kStage,
                    location(table.line_numbers[r], c + 1) + ": missing covariate value");
      }
      out.X(static_cast<Eigen::Index>(r), col++) = *value;
    }
  }
  return out;
}

void require_label(const Parsed& parsed, const Table& table, std::size_t r) {
  if (!parsed.y[r]) {
    throw Error(ErrorKind::MissingResponse, kStage,
                "line " + std::to_string(table.line_numbers[r]) + ": missing response '" + parsed.response_name + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, kStage, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

CsvDataset parse_dataset_csv_text(const std::string& text, const CsvOptions& options) {
  const Table table = read_table(text);
  const std::size_t rows = table.rows.size();
  if (rows < 3) throw Error(ErrorKind::ParseError, kStage, "need at least two labeled rows and a query row");
  Parsed parsed = parse_table(table, options.response);

  std::size_t query = 0;
  switch (options.policy) {
    case QueryRowPolicy::LastRowUnlabeled:
      query = rows - 1;
      if (parsed.y[query]) {
        throw Error(ErrorKind::ParseError, kStage,
                    "line " + std::to_string(table.line_numbers[query]) +
                        ": last row is labeled; use a held-out or random query policy");
      }
      break;
    case QueryRowPolicy::HeldOutIndex:
      if (options.index < 1 || options.index > rows) {
        throw Error(ErrorKind::InvalidArgument, kStage,
                    "query index " + std::to_string(options.index) + " outside 1.." + std::to_string(rows));
      }
      query = options.index - 1;
      break;
    case QueryRowPolicy::RandomWithSeed: {
      std::mt19937_64 rng(options.seed);
      query = std::uniform_int_distribution<std::size_t>(0, rows - 1)(rng);
      break;
    }
  }

  CsvDataset out;
  out.query_row = query + 1;
  out.feature_names = parsed.feature_names;
  out.response_name = parsed.response_name;
  out.x_new = parsed.X.row(static_cast<Eigen::Index>(query)).transpose();
  out.y_new = parsed.y[query];

  Eigen::MatrixXd X(static_cast<Eigen::Index>(rows - 1), parsed.X.cols());
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows - 1));
  Eigen::Index k = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (r == query) continue;
    require_label(parsed, table, r);
    X.row(k) = parsed.X.row(static_cast<Eigen::Index>(r));
    y(k) = *parsed.y[r];
    ++k;
  }
  out.data = make_dataset(std::move(X), std::move(y));
  return out;
}

CsvDataset parse_dataset_csv(const std::string& path, const CsvOptions& options) {
  return parse_dataset_csv_text(read_file(path), options);
}

Dataset parse_labeled_csv_text(const std::string& text, const std::string& response) {
  const Table table = read_table(text);
  Parsed parsed = parse_table(table, response);
  Eigen::VectorXd y(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    require_label(parsed, table, r);
    y(static_cast<Eigen::Index>(r)) = *parsed.y[r];
  }
  return make_dataset(std::move(parsed.X), std::move(y));
}

Dataset parse_labeled_csv(const std::string& path, const std::string& response) {
  return parse_labeled_csv_text(read_file(path), response);
}

}  // namespace scp

#include "aftsdar/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "aftsdar/errors.hpp"

namespace aftsdar {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    // Trim surrounding whitespace.
    const auto begin = cell.find_first_not_of(" \t\r");
    const auto end = cell.find_last_not_of(" \t\r");
    cells.push_back(begin == std::string::npos
                        ? std::string()
                        : cell.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_double(const std::string& cell, int row, const std::string& col) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw InputError("non-numeric cell '" + cell + "' at row " +
                     std::to_string(row) + ", column '" + col + "'");
  }
}

}  // namespace

SurvivalDataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw InputError("'" + path + "' is empty");
  const std::vector<std::string> header = split_csv_line(line);

  int time_col = -1, logtime_col = -1, status_col = -1;
  std::vector<int> covariate_cols;
  std::vector<std::string> names;
  for (int j = 0; j < static_cast<int>(header.size()); ++j) {
    if (header[j] == "time") {
      if (time_col >= 0) throw InputError("duplicate 'time' column");
      time_col = j;
    } else if (header[j] == "logtime") {
      if (logtime_col >= 0) throw InputError("duplicate 'logtime' column");
      logtime_col = j;
    } else if (header[j] == "status") {
      if (status_col >= 0) throw InputError("duplicate 'status' column");
      status_col = j;
    } else {
      covariate_cols.push_back(j);
      names.push_back(header[j]);
    }
  }
  if (time_col >= 0 && logtime_col >= 0)
    throw InputError("header has both 'time' and 'logtime'; use exactly one");
  if (time_col < 0 && logtime_col < 0)
    throw InputError("header needs a 'time' or 'logtime' column");
  if (status_col < 0) throw InputError("header needs a 'status' column");
  const bool log_transform = time_col >= 0;
  const int response_col = log_transform ? time_col : logtime_col;

  std::vector<double> y;
  std::vector<int> delta;
  std::vector<std::vector<double>> rows;
  int row_number = 1;  // header
  while (std::getline(in, line)) {
    ++row_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw InputError("row " + std::to_string(row_number) + " has " +
                       std::to_string(cells.size()) + " cells, expected " +
                       std::to_string(header.size()));

    const double t =
        parse_double(cells[response_col], row_number, header[response_col]);
    if (log_transform) {
      if (!(t > 0.0))
        throw InputError("time must be positive at row " +
                         std::to_string(row_number) + ", column 'time'");
      y.push_back(std::log(t));
    } else {
      y.push_back(t);
    }

    const std::string& s = cells[status_col];
    if (s == "0") {
      delta.push_back(0);
    } else if (s == "1") {
      delta.push_back(1);
    } else {
      throw InputError("status must be 0 or 1 at row " +
                       std::to_string(row_number) + ", column 'status'");
    }

    std::vector<double> xrow;
    xrow.reserve(covariate_cols.size());
    for (std::size_t k = 0; k < covariate_cols.size(); ++k)
      xrow.push_back(parse_double(cells[covariate_cols[k]], row_number,
                                  header[covariate_cols[k]]));
    rows.push_back(std::move(xrow));
  }

  const int n = static_cast<int>(y.size());
  const int p = static_cast<int>(covariate_cols.size());
  SurvivalDataset ds;
  ds.y = Eigen::Map<Eigen::VectorXd>(y.data(), n);
  ds.delta.resize(n);
  for (int i = 0; i < n; ++i) ds.delta[i] = delta[i];
  ds.X.resize(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) ds.X(i, j) = rows[i][j];
  ds.feature_names = std::move(names);
  ds.validate();
  return ds;
}

void write_dataset_csv(const std::string& path, const SurvivalDataset& dataset) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out.precision(17);
  out << "logtime,status";
  for (int j = 0; j < dataset.p(); ++j) {
    out << ',';
    if (static_cast<int>(dataset.feature_names.size()) == dataset.p())
      out << dataset.feature_names[j];
    else
      out << "x" << (j + 1);
  }
  out << '\n';
  for (int i = 0; i < dataset.n(); ++i) {
    out << dataset.y[i] << ',' << dataset.delta[i];
    for (int j = 0; j < dataset.p(); ++j) out << ',' << dataset.X(i, j);
    out << '\n';
  }
}

}  // namespace aftsdar

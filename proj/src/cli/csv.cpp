#include "itda/cli/csv.hpp"

#include "itda/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace itda::cli {
namespace {

struct Table {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
  bool had_header = false;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

bool parse_int(std::string_view cell, int& out) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  Table t;
  std::string line;
  std::size_t number = 0;
  std::optional<std::size_t> width;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    if (!width) {
      width = cells.size();
      bool numeric = true;
      for (const auto& c : cells) {
        double v;
        numeric = numeric && parse_double(c, v);
      }
      if (!numeric) {
        t.had_header = true;
        continue;
      }
    }
    if (cells.size() != *width)
      throw ParseError("ragged row: expected " + std::to_string(*width) + " fields, found " + std::to_string(cells.size()),
                       number);
    t.rows.push_back(std::move(cells));
    t.line_numbers.push_back(number);
  }
  if (in.bad()) throw IoError("error reading " + path.string());
  if (t.rows.empty()) throw ParseError(path.string() + " contains no data rows", 0);
  return t;
}

Eigen::MatrixXd numeric_block(const Table& t, std::size_t cols) {
  Eigen::MatrixXd x(static_cast<Index>(t.rows.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      double v;
      if (!parse_double(t.rows[r][c], v))
        throw ParseError("non-numeric value '" + t.rows[r][c] + "' in column " + std::to_string(c + 1), t.line_numbers[r]);
      if (!std::isfinite(v)) throw ParseError("non-finite value in column " + std::to_string(c + 1), t.line_numbers[r]);
      x(static_cast<Index>(r), static_cast<Index>(c)) = v;
    }
  return x;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_matrix_rows(std::ostream& out, const Eigen::MatrixXd& x, const std::vector<int>* labels) {
  for (Index r = 0; r < x.rows(); ++r) {
    for (Index c = 0; c < x.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(x(r, c));
    }
    if (labels) out << ',' << (*labels)[static_cast<std::size_t>(r)];
    out << '\n';
  }
}

void write_header(std::ostream& out, Index dim, bool labeled) {
  for (Index c = 0; c < dim; ++c) out << (c ? "," : "") << 'f' << c;
  if (labeled) out << ",label";
  out << '\n';
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("error writing " + path.string());
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) throw std::runtime_error("cannot format double");
  return std::string(buf, ptr);
}

SourceDataset load_labeled_csv(const std::filesystem::path& path, std::optional<int> num_classes) {
  const Table t = read_table(path);
  const std::size_t width = t.rows.front().size();
  if (width < 2) throw ParseError("labeled CSV needs at least one feature column and a label column", t.line_numbers.front());
  Eigen::MatrixXd x = numeric_block(t, width - 1);
  std::vector<int> labels(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    int y;
    if (!parse_int(t.rows[r].back(), y)) throw ParseError("label '" + t.rows[r].back() + "' is not an integer", t.line_numbers[r]);
    if (y < 0 || (num_classes && y >= *num_classes))
      throw ParseError("label " + std::to_string(y) + " out of range", t.line_numbers[r]);
    labels[r] = y;
  }
  try {
    FeatureMatrix features(std::move(x));
    return num_classes ? SourceDataset(std::move(features), std::move(labels), *num_classes)
                       : SourceDataset::with_inferred_classes(std::move(features), std::move(labels));
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

TargetDataset load_unlabeled_csv(const std::filesystem::path& path) {
  const Table t = read_table(path);
  return TargetDataset(FeatureMatrix(numeric_block(t, t.rows.front().size())));
}

std::variant<SourceDataset, TargetDataset> load_csv(const std::filesystem::path& path, bool labeled) {
  if (labeled) return load_labeled_csv(path);
  return load_unlabeled_csv(path);
}

std::vector<int> load_labels_csv(const std::filesystem::path& path) {
  const Table t = read_table(path);
  if (t.rows.front().size() != 1) throw ParseError("label file must have exactly one column", t.line_numbers.front());
  std::vector<int> labels(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (!parse_int(t.rows[r][0], labels[r]) || labels[r] < 0)
      throw ParseError("invalid label '" + t.rows[r][0] + "'", t.line_numbers[r]);
  }
  return labels;
}

Transform load_transform_csv(const std::filesystem::path& path) {
  const Table t = read_table(path);
  try {
    return Transform(numeric_block(t, t.rows.front().size()));
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

void save_csv(const std::filesystem::path& path, const SourceDataset& data) {
  auto out = open_out(path);
  write_header(out, data.dim(), true);
  write_matrix_rows(out, data.features().values(), &data.labels());
  finish(out, path);
}

void save_csv(const std::filesystem::path& path, const TargetDataset& data) {
  auto out = open_out(path);
  write_header(out, data.dim(), false);
  write_matrix_rows(out, data.features().values(), nullptr);
  finish(out, path);
}

void save_labels_csv(const std::filesystem::path& path, const std::vector<int>& labels) {
  auto out = open_out(path);
  out << "label\n";
  for (int y : labels) out << y << '\n';
  finish(out, path);
}

void save_transform_csv(const std::filesystem::path& path, const Transform& transform) {
  auto out = open_out(path);
  write_matrix_rows(out, transform.matrix(), nullptr);
  finish(out, path);
}

}  // namespace itda::cli

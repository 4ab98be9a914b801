#include "stabcert/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace stabcert {

namespace {

std::runtime_error io_error(const std::string& path, const std::string& what) {
  return std::runtime_error(path + ": " + what);
}

std::vector<std::vector<double>> read_numeric_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path, "cannot open file");
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Tolerate comma, semicolon, tab or space separation.
    for (char& ch : line) {
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    }
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    std::string rest;
    if (ss.clear(), ss >> rest) {
      throw io_error(path, "malformed number on line " + std::to_string(line_no));
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw io_error(path, "no data rows");
  return rows;
}

void write_double(std::FILE* f, double v) {
  // Shortest round-trip representation keeps reruns byte-identical.
  std::fprintf(f, "%.17g", v);
}

class File {
 public:
  File(const std::string& path, const char* mode) : f_(std::fopen(path.c_str(), mode)) {
    if (f_ == nullptr) throw io_error(path, "cannot open for writing");
  }
  ~File() {
    if (f_ != nullptr) std::fclose(f_);
  }
  File(const File&) = delete;
  File& operator=(const File&) = delete;
  std::FILE* get() const { return f_; }

 private:
  std::FILE* f_;
};

}  // namespace

Dataset read_points_csv(const std::string& path) {
  const auto rows = read_numeric_rows(path);
  const std::size_t d = rows.front().size();
  Matrix points(rows.size(), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      throw io_error(path, "row " + std::to_string(i + 1) +
                               " has inconsistent column count");
    }
    for (std::size_t j = 0; j < d; ++j) points(i, j) = rows[i][j];
  }
  return Dataset(std::move(points));
}

void write_points_csv(const std::string& path, const Matrix& points) {
  File f(path, "w");
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (j > 0) std::fputc(',', f.get());
      write_double(f.get(), points(i, j));
    }
    std::fputc('\n', f.get());
  }
}

std::vector<int> read_labels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path, "cannot open file");
  std::vector<int> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed;
    for (char ch : line) {
      if (!std::isspace(static_cast<unsigned char>(ch))) trimmed += ch;
    }
    if (trimmed.empty()) continue;
    int value = 0;
    const auto* begin = trimmed.data();
    const auto* end = begin + trimmed.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
      throw io_error(path, "malformed label on line " + std::to_string(line_no));
    }
    labels.push_back(value);
  }
  if (labels.empty()) throw io_error(path, "no labels");
  return labels;
}

void write_labels(const std::string& path, const std::vector<int>& labels) {
  File f(path, "w");
  for (int v : labels) std::fprintf(f.get(), "%d\n", v);
}

SimilarityGraph read_similarity(const std::string& path) {
  const auto rows = read_numeric_rows(path);
  const std::size_t n_rows = rows.size();
  bool square = true;
  for (const auto& row : rows) {
    if (row.size() != n_rows) {
      square = false;
      break;
    }
  }
  if (square) {
    Matrix w(n_rows, n_rows);
    for (std::size_t i = 0; i < n_rows; ++i)
      for (std::size_t j = 0; j < n_rows; ++j) w(i, j) = rows[i][j];
    return SimilarityGraph(std::move(w));
  }
  // Coordinate triplets i, j, weight.
  int n = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != 3) {
      throw io_error(path, "expected a square matrix or i,j,w triplets");
    }
    const double fi = rows[r][0];
    const double fj = rows[r][1];
    if (fi != std::floor(fi) || fj != std::floor(fj) || fi < 0 || fj < 0) {
      throw io_error(path, "coordinate indices must be nonnegative integers");
    }
    n = std::max(n, static_cast<int>(fi) + 1);
    n = std::max(n, static_cast<int>(fj) + 1);
  }
  Matrix w = Matrix::Zero(n, n);
  for (const auto& row : rows) {
    const int i = static_cast<int>(row[0]);
    const int j = static_cast<int>(row[1]);
    w(i, j) = row[2];
    w(j, i) = row[2];
  }
  return SimilarityGraph(std::move(w));
}

void write_similarity_csv(const std::string& path, const Matrix& weights) {
  write_points_csv(path, weights);
}

Vector read_weights(const std::string& path) {
  const auto rows = read_numeric_rows(path);
  Vector w(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 1) {
      throw io_error(path, "expected one weight per line");
    }
    w(i) = rows[i][0];
  }
  return w;
}

}  // namespace stabcert

#include "divsel/io.hpp"

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace divsel {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    if (pos == std::string::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

bool parse_double(const std::string& cell, double* out) {
  const char* first = cell.data();
  const char* last = first + cell.size();
  const auto res = std::from_chars(first, last, *out);
  return res.ec == std::errc() && res.ptr == last && !cell.empty();
}

char delimiter(MatrixFormat format) {
  return format == MatrixFormat::kTsv ? '\t' : ',';
}

}  // namespace

MatrixFormat format_from_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return MatrixFormat::kCsv;
  const std::string ext = path.substr(dot);
  return (ext == ".tsv" || ext == ".tab") ? MatrixFormat::kTsv
                                          : MatrixFormat::kCsv;
}

Matrix read_matrix(const std::string& path, MatrixFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  const char delim = delimiter(format);

  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  std::size_t width = 0;
  bool first_content_row = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, delim);
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!parse_double(cells[i], &values[i])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (first_content_row) {  // header row, skipped
        first_content_row = false;
        width = cells.size();
        continue;
      }
      throw std::runtime_error("non-numeric cell at line " +
                               std::to_string(line_no) + " of " + path);
    }
    if (first_content_row) {
      first_content_row = false;
      width = cells.size();
    } else if (cells.size() != width) {
      throw std::runtime_error(
          "ragged row at line " + std::to_string(line_no) + " of " + path +
          ": got " + std::to_string(cells.size()) + " cells, expected " +
          std::to_string(width));
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw std::runtime_error("no numeric rows in " + path);

  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(width));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

void atomic_write_text(const std::string& path, const std::string& content) {
  const std::string tmp =
      path + ".tmp." + std::to_string(static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create file: " + tmp);
    out << content;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw std::runtime_error("write failed: " + tmp);
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("cannot rename into place: " + path);
  }
}

void write_matrix(const std::string& path, const Matrix& m,
                  MatrixFormat format) {
  require(m.rows() > 0 && m.cols() > 0, "refusing to write an empty matrix");
  const char delim = delimiter(format);
  std::string body;
  body.reserve(static_cast<std::size_t>(m.size()) * 20);
  char buf[40];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      body += buf;
      body += (j + 1 < m.cols()) ? delim : '\n';
    }
  }
  atomic_write_text(path, body);
}

}  // namespace divsel

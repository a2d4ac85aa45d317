#include "rkhslab/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "rkhslab/error.hpp"

namespace rkhslab::csv {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& msg) {
  std::ostringstream os;
  os << path.string() << ":" << line << ": " << msg;
  throw Error(ErrorCode::io, os.str());
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma - start);
    while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
    while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
      cell.remove_suffix(1);
    }
    out.push_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view cell, const std::filesystem::path& path,
                    std::size_t line) {
  double x = 0.0;
  const char* end = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(cell.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    fail(path, line, "cannot parse number '" + std::string(cell) + "'");
  }
  return x;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    lines.push_back(std::move(line));
  }
  return lines;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::vector<Sample> read_samples(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) fail(path, 1, "empty file");
  const auto header = split(lines[0]);
  if (header.size() != 3 || header[0] != "point" || header[1] != "value_re" ||
      header[2] != "value_im") {
    fail(path, 1, "expected header 'point,value_re,value_im'");
  }
  std::vector<Sample> out;
  out.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    if (cells.size() != 3) fail(path, i + 1, "expected 3 columns");
    out.push_back({parse_double(cells[0], path, i + 1),
                   cplx(parse_double(cells[1], path, i + 1),
                        parse_double(cells[2], path, i + 1))});
  }
  return out;
}

void write_samples(const std::filesystem::path& path, const Grid& grid,
                   const DiscreteFunction& f) {
  require_aligned(f, grid, "exported function");
  auto out = open_out(path);
  out << "point,value_re,value_im\n";
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    out << format_double(grid.point(i)) << ',' << format_double(f[i].real())
        << ',' << format_double(f[i].imag()) << '\n';
  }
}

DiscreteFunction read_function(const std::filesystem::path& path, const Grid& grid) {
  const auto samples = read_samples(path);
  if (static_cast<Eigen::Index>(samples.size()) != grid.size()) {
    std::ostringstream os;
    os << path.string() << " has " << samples.size() << " rows but the grid has "
       << grid.size() << " points";
    throw Error(ErrorCode::grid_mismatch, os.str());
  }
  const double tol = 1e-9 * std::max({1.0, std::abs(grid.lower()), std::abs(grid.upper())});
  CVector v(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (std::abs(samples[i].point - grid.point(i)) > tol) {
      std::ostringstream os;
      os << path.string() << " row " << i + 1 << ": point " << samples[i].point
         << " does not match grid node " << grid.point(i);
      throw Error(ErrorCode::grid_mismatch, os.str());
    }
    v[i] = samples[i].value;
  }
  return DiscreteFunction(grid, std::move(v));
}

CMatrix read_matrix(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) fail(path, 1, "empty file");
  const auto header = split(lines[0]);
  const bool complex = !header.empty() && header[0].ends_with("_re");
  const std::size_t width = complex ? header.size() / 2 : header.size();
  if (width == 0 || (complex && header.size() % 2 != 0)) {
    fail(path, 1, "malformed matrix header");
  }
  CMatrix m(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(width));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r]);
    if (cells.size() != header.size()) {
      fail(path, r + 1, "row width differs from header");
    }
    for (std::size_t c = 0; c < width; ++c) {
      const auto row = static_cast<Eigen::Index>(r - 1);
      const auto col = static_cast<Eigen::Index>(c);
      if (complex) {
        m(row, col) = cplx(parse_double(cells[2 * c], path, r + 1),
                           parse_double(cells[2 * c + 1], path, r + 1));
      } else {
        m(row, col) = parse_double(cells[c], path, r + 1);
      }
    }
  }
  return m;
}

void write_matrix(const std::filesystem::path& path, const CMatrix& m,
                  MatrixMode mode) {
  if (mode == MatrixMode::real && !(m.imag().array() == 0.0).all()) {
    throw Error(ErrorCode::invalid_argument,
                "real-mode export of a matrix with imaginary parts");
  }
  auto out = open_out(path);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (c > 0) out << ',';
    if (mode == MatrixMode::complex) {
      out << 'c' << c << "_re,c" << c << "_im";
    } else {
      out << 'c' << c;
    }
  }
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_double(m(r, c).real());
      if (mode == MatrixMode::complex) out << ',' << format_double(m(r, c).imag());
    }
    out << '\n';
  }
}

}  // namespace rkhslab::csv

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wsnmf/errors.hpp"
#include "wsnmf/signals.hpp"

namespace wsnmf {

namespace {

// Used when a file omits the dt column (plain "id,label,s0,..." header).
constexpr double kDefaultDt = 0.125e-9;

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      return cells;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_cell(std::string_view cell, std::size_t line, std::size_t column) {
  cell = trim(cell);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": cannot parse '" + std::string(cell) + "' as a number",
                     line, column);
  }
  if (!std::isfinite(v)) {
    throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": non-finite value '" + std::string(cell) + "'",
                     line, column);
  }
  return v;
}

void check_field(const std::string& field) {
  if (field.find_first_of(",\"\n\r") != std::string::npos) {
    throw DomainError("field '" + field + "' contains a comma, quote or newline");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

Ensemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("missing header row", 1);
  ++line_no;
  const auto header = split(line);
  if (header.size() < 2 || trim(header[0]) != "id" || trim(header[1]) != "label") {
    throw ParseError("line 1: header must start with id,label", 1);
  }
  const bool has_dt = header.size() > 2 && trim(header[2]) == "dt";
  const std::size_t first_sample = has_dt ? 3 : 2;
  const std::size_t width = header.size();

  std::vector<Signal> signals;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != width) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(width) + " columns, found " +
                           std::to_string(cells.size()),
                       line_no);
    }
    Signal s;
    s.id = std::string(trim(cells[0]));
    s.label = std::string(trim(cells[1]));
    s.dt = has_dt ? parse_cell(cells[2], line_no, 3) : kDefaultDt;
    if (!(s.dt > 0.0)) {
      throw ParseError("line " + std::to_string(line_no) + ": dt must be positive", line_no, 3);
    }
    s.samples.reserve(width - first_sample);
    for (std::size_t c = first_sample; c < width; ++c) {
      s.samples.push_back(parse_cell(cells[c], line_no, c + 1));
    }
    if (s.samples.size() < 2) {
      throw ParseError("line " + std::to_string(line_no) + ": fewer than 2 samples", line_no);
    }
    if (!signals.empty() && s.dt != signals.front().dt) {
      throw ParseError("line " + std::to_string(line_no) + ": dt differs from first row",
                       line_no, 3);
    }
    signals.push_back(std::move(s));
  }
  return Ensemble(std::move(signals));
}

void save_ensemble(const Ensemble& e, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "id,label,dt";
  for (std::size_t k = 0; k < e.n(); ++k) out << ",s" << k;
  out << '\n';
  for (const auto& s : e.signals()) {
    check_field(s.id);
    check_field(s.label);
    out << s.id << ',' << s.label << ',' << format_double(s.dt);
    for (double v : s.samples) out << ',' << format_double(v);
    out << '\n';
  }
  std::ofstream file(path, std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write '" + path.string() + "'");
  file << out.str();
  if (!file) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace wsnmf

#include "combperc/field_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace combperc {

namespace {

constexpr const char* kMagic = "combperc-field";
constexpr int kVersion = 1;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> rows_of(const PercolationField& field) {
  const LatticeWindow& w = field.window();
  const auto row_len = static_cast<std::size_t>(w.vertical().size());
  std::vector<std::string> rows;
  rows.reserve(w.volume() / row_len);
  for (std::size_t start = 0; start < w.volume(); start += row_len) {
    std::string row(row_len, '0');
    for (std::size_t j = 0; j < row_len; ++j) {
      if (field.open_at(start + j)) row[j] = '1';
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::uint8_t> states_from_rows(const LatticeWindow& w,
                                           const std::vector<std::string>& rows) {
  const auto row_len = static_cast<std::size_t>(w.vertical().size());
  if (rows.size() * row_len != w.volume()) {
    throw std::runtime_error("field: row count does not match window");
  }
  std::vector<std::uint8_t> states;
  states.reserve(w.volume());
  for (const std::string& row : rows) {
    if (row.size() != row_len) throw std::runtime_error("field: bad row length");
    for (char ch : row) {
      if (ch != '0' && ch != '1') throw std::runtime_error("field: bad state character");
      states.push_back(ch == '1' ? 1 : 0);
    }
  }
  return states;
}

void expect(std::istream& is, const std::string& keyword) {
  std::string tok;
  if (!(is >> tok) || tok != keyword) {
    throw std::runtime_error("field: expected '" + keyword + "'");
  }
}

}  // namespace

void write_field_text(std::ostream& os, const PercolationField& field) {
  const LatticeWindow& w = field.window();
  os << kMagic << ' ' << kVersion << '\n';
  os << "dim " << w.dim() << '\n';
  for (int a = 0; a < w.dim(); ++a) {
    os << "range " << a << ' ' << w.range(a).lo << ' ' << w.range(a).hi << '\n';
  }
  os << "padding " << w.padding() << '\n';
  os << "p " << format_double(field.p()) << '\n';
  os << "seed " << field.seed() << '\n';
  os << "data\n";
  for (const std::string& row : rows_of(field)) os << row << '\n';
  os << "end\n";
}

PercolationField read_field_text(std::istream& is) {
  expect(is, kMagic);
  int version = 0;
  if (!(is >> version) || version != kVersion) {
    throw std::runtime_error("field: unsupported version");
  }
  expect(is, "dim");
  int d = 0;
  if (!(is >> d) || d < 2 || d > kMaxDim) throw std::runtime_error("field: bad dim");
  std::vector<Range> ranges(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    expect(is, "range");
    int axis = -1;
    Range r;
    if (!(is >> axis >> r.lo >> r.hi) || axis != a) {
      throw std::runtime_error("field: bad range line");
    }
    ranges[static_cast<std::size_t>(a)] = r;
  }
  expect(is, "padding");
  int padding = 0;
  if (!(is >> padding)) throw std::runtime_error("field: bad padding");
  expect(is, "p");
  std::string p_text;
  if (!(is >> p_text)) throw std::runtime_error("field: bad p");
  const double p = std::stod(p_text);
  expect(is, "seed");
  std::uint64_t seed = 0;
  if (!(is >> seed)) throw std::runtime_error("field: bad seed");
  expect(is, "data");

  LatticeWindow window(std::move(ranges), padding);
  std::vector<std::string> rows;
  std::string tok;
  while (is >> tok && tok != "end") rows.push_back(tok);
  if (tok != "end") throw std::runtime_error("field: missing 'end'");
  return PercolationField(window, states_from_rows(window, rows), p, seed);
}

nlohmann::json field_to_json(const PercolationField& field) {
  const LatticeWindow& w = field.window();
  if (w.volume() > kMaxJsonSites) {
    throw std::length_error("field_to_json: window too large for JSON export");
  }
  nlohmann::json ranges = nlohmann::json::array();
  for (const Range& r : w.ranges()) ranges.push_back({r.lo, r.hi});
  return {
      {"format", kMagic},
      {"version", kVersion},
      {"dim", w.dim()},
      {"ranges", ranges},
      {"padding", w.padding()},
      {"p", field.p()},
      {"seed", field.seed()},
      {"rows", rows_of(field)},
  };
}

PercolationField field_from_json(const nlohmann::json& doc) {
  if (doc.at("format").get<std::string>() != kMagic ||
      doc.at("version").get<int>() != kVersion) {
    throw std::runtime_error("field json: unsupported format");
  }
  std::vector<Range> ranges;
  for (const auto& r : doc.at("ranges")) {
    ranges.push_back({r.at(0).get<int>(), r.at(1).get<int>()});
  }
  if (static_cast<int>(ranges.size()) != doc.at("dim").get<int>()) {
    throw std::runtime_error("field json: dim does not match ranges");
  }
  LatticeWindow window(std::move(ranges), doc.at("padding").get<int>());
  auto rows = doc.at("rows").get<std::vector<std::string>>();
  return PercolationField(window, states_from_rows(window, rows),
                          doc.at("p").get<double>(),
                          doc.at("seed").get<std::uint64_t>());
}

}  // namespace combperc

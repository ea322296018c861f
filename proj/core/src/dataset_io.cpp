#include "moocgraph/dataset_io.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "moocgraph/errors.hpp"

namespace moocgraph {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

double parse_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError("malformed number '" + std::string(s) + "'");
  }
  return v;
}

template <class Int>
Int parse_int(std::string_view s) {
  Int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw IoError("malformed integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  if (in.bad()) throw IoError("read error");
  return lines;
}

}  // namespace

void write_sparse(const Dataset& data, std::ostream& out) {
  for (const auto& inst : data.instances) {
    out << inst.label;
    for (const auto& [name, value] : inst.features) {
      const auto col = data.column_of(name);
      if (!col) throw IoError("feature '" + name + "' missing from index");
      out << ' ' << (*col + 1) << ':' << format_double(value);
    }
    out << '\n';
  }
}

void write_feature_index(const std::vector<std::string>& index, std::ostream& out) {
  for (std::size_t i = 0; i < index.size(); ++i) out << (i + 1) << '\t' << index[i] << '\n';
}

std::vector<std::string> read_feature_index(std::istream& in) {
  std::vector<std::string> index;
  for (const auto& line : read_lines(in)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw IoError("malformed feature index line: " + line);
    const auto idx = parse_int<std::size_t>(std::string_view(line).substr(0, tab));
    if (idx != index.size() + 1) throw IoError("feature index out of order at " + std::to_string(idx));
    index.push_back(line.substr(tab + 1));
  }
  return index;
}

void write_instance_ids(const Dataset& data, std::ostream& out) {
  for (const auto& inst : data.instances) {
    out << inst.id.student_id << ',' << inst.id.courseweek << ',' << to_string(inst.id.setup) << '\n';
  }
}

Dataset read_dataset(std::istream& rows, std::istream& index, std::istream& ids) {
  Dataset ds;
  ds.feature_index = read_feature_index(index);
  const auto row_lines = read_lines(rows);
  const auto id_lines = read_lines(ids);
  if (row_lines.size() != id_lines.size()) throw IoError("row count differs from id count");

  for (std::size_t r = 0; r < row_lines.size(); ++r) {
    FeatureVector fv;
    std::istringstream row(row_lines[r]);
    std::string tok;
    if (!(row >> tok)) throw IoError("empty dataset row");
    fv.label = parse_int<int>(tok);
    if (fv.label != 0 && fv.label != 1) throw IoError("label must be 0 or 1");
    while (row >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) throw IoError("malformed entry '" + tok + "'");
      const auto col = parse_int<std::size_t>(std::string_view(tok).substr(0, colon));
      if (col == 0 || col > ds.feature_index.size()) throw IoError("column out of range in '" + tok + "'");
      fv.features[ds.feature_index[col - 1]] = parse_double(std::string_view(tok).substr(colon + 1));
    }

    std::string_view id_line = id_lines[r];
    const auto c1 = id_line.find(',');
    const auto c2 = id_line.find(',', c1 == std::string_view::npos ? c1 : c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos) throw IoError("malformed id line");
    fv.id.student_id = parse_int<std::int64_t>(id_line.substr(0, c1));
    fv.id.courseweek = parse_int<int>(id_line.substr(c1 + 1, c2 - c1 - 1));
    const auto setup = parse_setup(id_line.substr(c2 + 1));
    if (!setup) throw IoError("unknown setup in id line");
    fv.id.setup = *setup;
    ds.setup = *setup;
    ds.instances.push_back(std::move(fv));
  }
  return ds;
}

void write_dense_csv(const Dataset& data, std::ostream& out) {
  out << "sid,courseweek,setup,label";
  for (const auto& name : data.feature_index) out << ',' << name;
  out << '\n';
  for (const auto& inst : data.instances) {
    out << inst.id.student_id << ',' << inst.id.courseweek << ',' << to_string(inst.id.setup) << ',' << inst.label;
    for (const auto& name : data.feature_index) {
      const auto it = inst.features.find(name);
      out << ',' << format_double(it == inst.features.end() ? 0.0 : it->second);
    }
    out << '\n';
  }
}

}  // namespace moocgraph

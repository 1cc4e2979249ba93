#include "iissqda/datamodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace iissqda {
namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') {
    cells.emplace_back();
  }
  return cells;
}

std::string trim(std::string s) {
  const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(static_cast<unsigned char>(s.back()))) {
    s.pop_back();
  }
  std::size_t start = 0;
  while (start < s.size() && issp(static_cast<unsigned char>(s[start]))) {
    ++start;
  }
  return s.substr(start);
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  const std::string s = trim(cell);
  double value = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') {
    ++first;
  }
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw DataError("non-numeric cell '" + s + "' at data row " + std::to_string(row) +
                    ", column '" + column + "'");
  }
  return value;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open file '" + path + "'");
  }
  RawTable table;
  std::string line;
  if (!std::getline(in, line)) {
    throw DataError("file '" + path + "' is empty (header row required)");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  for (auto& h : split_line(line)) {
    table.header.push_back(trim(h));
  }
  std::size_t lineNo = 1;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (trim(line).empty()) {
      continue;
    }
    auto cells = split_line(line);
    if (cells.size() != table.header.size()) {
      throw DataError("line " + std::to_string(lineNo) + " has " + std::to_string(cells.size()) +
                      " cells, header has " + std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(cells));
  }
  return table;
}

}  // namespace

LabeledDataset load_csv(const std::string& path, const CsvOptions& options) {
  const RawTable table = read_table(path);
  const auto it = std::find(table.header.begin(), table.header.end(), options.labelColumn);
  if (it == table.header.end()) {
    throw DataError("label column '" + options.labelColumn + "' not found in header");
  }
  const auto labelPos = static_cast<std::size_t>(it - table.header.begin());

  std::set<std::string> distinct;
  for (const auto& row : table.rows) {
    distinct.insert(trim(row[labelPos]));
  }
  if (distinct.size() != 2) {
    throw DataError("not a two-class problem: label column has " +
                    std::to_string(distinct.size()) + " distinct values");
  }
  std::array<std::string, 2> classNames{*distinct.begin(), *std::next(distinct.begin())};
  if (options.class1Label) {
    if (*options.class1Label == classNames[1]) {
      std::swap(classNames[0], classNames[1]);
    } else if (*options.class1Label != classNames[0]) {
      throw DataError("class-1 label '" + *options.class1Label + "' does not occur in the data");
    }
  }

  std::vector<std::string> names;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (c != labelPos) {
      names.push_back(table.header[c]);
    }
  }
  Matrix x(static_cast<Index>(table.rows.size()), static_cast<Index>(names.size()));
  std::vector<int> labels;
  labels.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Index col = 0;
    for (std::size_t c = 0; c < table.header.size(); ++c) {
      if (c == labelPos) {
        continue;
      }
      x(static_cast<Index>(r), col++) = parse_number(table.rows[r][c], r + 1, table.header[c]);
    }
    labels.push_back(trim(table.rows[r][labelPos]) == classNames[0] ? 1 : 2);
  }
  return {std::move(x), std::move(labels), std::move(names), classNames};
}

Matrix load_feature_csv(const std::string& path, const std::string& labelColumn,
                        std::vector<std::string>* names) {
  const RawTable table = read_table(path);
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] != labelColumn) {
      keep.push_back(c);
    }
  }
  Matrix x(static_cast<Index>(table.rows.size()), static_cast<Index>(keep.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t k = 0; k < keep.size(); ++k) {
      x(static_cast<Index>(r), static_cast<Index>(k)) =
          parse_number(table.rows[r][keep[k]], r + 1, table.header[keep[k]]);
    }
  }
  if (names != nullptr) {
    names->clear();
    for (std::size_t c : keep) {
      names->push_back(table.header[c]);
    }
  }
  return x;
}

void write_csv(const LabeledDataset& data, const std::string& path, const std::string& labelColumn) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write file '" + path + "'");
  }
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& name : data.featureNames()) {
    out << name << ',';
  }
  out << labelColumn << '\n';
  for (Index i = 0; i < data.n(); ++i) {
    for (Index j = 0; j < data.p(); ++j) {
      out << data.features()(i, j) << ',';
    }
    out << data.classNames()[static_cast<std::size_t>(data.labels()[static_cast<std::size_t>(i)] - 1)]
        << '\n';
  }
  if (!out) {
    throw DataError("write to '" + path + "' failed");
  }
}

}  // namespace iissqda

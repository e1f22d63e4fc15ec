// Copyright 2026 The vflsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "json.hpp"
#include "vflsim/data/dataset.h"

namespace vflsim {
namespace {

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string Trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && s[start] == ' ') ++start;
  return s.substr(start);
}

std::string Where(const std::string& path, std::size_t line, std::size_t col) {
  return path + ":" + std::to_string(line) + " column " + std::to_string(col);
}

double ParseCell(const std::string& cell, const std::string& where) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || cell.empty()) {
    throw std::invalid_argument("LoadCsv: non-numeric cell '" + cell +
                                "' at " + where);
  }
  return v;
}

}  // namespace

CsvSchema LoadCsvSchema(const std::string& csv_path) {
  CsvSchema schema;
  const std::string meta = csv_path + ".meta.json";
  if (!std::filesystem::exists(meta)) return schema;
  std::ifstream in(meta);
  nlohmann::json j = nlohmann::json::parse(in);
  schema.num_classes = j.value("num_classes", 0);
  if (j.contains("grid_height") || j.contains("grid_width")) {
    schema.grid = GridShape{j.at("grid_height").get<std::size_t>(),
                            j.at("grid_width").get<std::size_t>()};
  }
  if (j.contains("label_column")) {
    schema.label_column = j["label_column"].get<std::string>();
  }
  return schema;
}

Dataset LoadCsv(const std::string& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("LoadCsv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("LoadCsv: " + path + " has no header");
  }
  std::vector<std::string> header = SplitLine(line);
  for (auto& h : header) h = Trim(h);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t c = 0; c < header.size(); ++c) index[header[c]] = c;

  auto label_it = index.find(schema.label_column);
  if (label_it == index.end()) {
    throw std::invalid_argument("LoadCsv: " + path + " lacks label column '" +
                                schema.label_column + "'");
  }
  const std::size_t label_col = label_it->second;
  std::vector<std::size_t> feature_cols;
  if (schema.feature_columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != label_col) feature_cols.push_back(c);
    }
  } else {
    for (const auto& name : schema.feature_columns) {
      auto it = index.find(name);
      if (it == index.end()) {
        throw std::invalid_argument("LoadCsv: " + path +
                                    " lacks feature column '" + name + "'");
      }
      feature_cols.push_back(it->second);
    }
  }

  std::vector<double> values;
  std::vector<int> labels;
  std::size_t line_no = 1;
  int max_label = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    std::vector<std::string> cells = SplitLine(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument(
          "LoadCsv: ragged row at " + path + ":" + std::to_string(line_no) +
          " (" + std::to_string(cells.size()) + " cells, header has " +
          std::to_string(header.size()) + ")");
    }
    const double raw_label =
        ParseCell(Trim(cells[label_col]), Where(path, line_no, label_col));
    const int label = static_cast<int>(raw_label);
    if (static_cast<double>(label) != raw_label || label < 0) {
      throw std::invalid_argument("LoadCsv: label must be a nonnegative "
                                  "integer at " +
                                  Where(path, line_no, label_col));
    }
    if (schema.num_classes > 0 && label >= schema.num_classes) {
      throw std::invalid_argument("LoadCsv: label " + std::to_string(label) +
                                  " out of range at " +
                                  Where(path, line_no, label_col));
    }
    max_label = std::max(max_label, label);
    labels.push_back(label);
    for (std::size_t c : feature_cols) {
      values.push_back(ParseCell(Trim(cells[c]), Where(path, line_no, c)));
    }
  }

  Dataset data;
  data.labels = std::move(labels);
  data.features = RealMatrix(data.labels.size(), feature_cols.size(),
                             std::move(values));
  data.num_classes = schema.num_classes > 0 ? schema.num_classes : max_label + 1;
  data.grid = schema.grid;
  data.Validate();
  return data;
}

void WriteCsv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("WriteCsv: cannot open " + path);
  out << "label";
  for (std::size_t k = 0; k < data.dim(); ++k) out << ",f" << k;
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << data.labels[i];
    for (double v : data.features.row(i)) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << ',' << buf;
    }
    out << '\n';
  }
  nlohmann::json meta = {{"num_classes", data.num_classes}};
  if (data.grid) {
    meta["grid_height"] = data.grid->height;
    meta["grid_width"] = data.grid->width;
  }
  std::ofstream(path + ".meta.json") << meta.dump(2) << '\n';
}

}  // namespace vflsim

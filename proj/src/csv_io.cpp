//
// Copyright 2026 The privmarg Authors
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

#include "privmarg/csv_io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace privmarg {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  // A trailing comma means a final empty cell.
  if (!line.empty() && (line.back() == ',' ||
                        (line.size() >= 2 && line[line.size() - 2] == ',' &&
                         line.back() == '\r'))) {
    cells.push_back("");
  }
  return cells;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("ingest_csv: cannot open '" + path + "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(split_csv_line(line));
  }
  if (rows.empty()) {
    throw std::runtime_error("ingest_csv: '" + path + "' has no header row");
  }
  return rows;
}

}  // namespace

Domain read_domain_json(const std::string& path,
                        std::vector<std::vector<std::string>>* value_dicts) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_domain_json: cannot open '" + path + "'");
  }
  const auto doc = nlohmann::ordered_json::parse(in);
  if (!doc.is_object()) {
    throw std::runtime_error("read_domain_json: expected a JSON object");
  }
  std::vector<std::string> names;
  std::vector<Index> sizes;
  std::vector<std::vector<std::string>> dicts;
  for (const auto& [name, value] : doc.items()) {
    names.push_back(name);
    if (value.is_number_integer()) {
      sizes.push_back(value.get<Index>());
      dicts.emplace_back();
    } else if (value.is_object()) {
      sizes.push_back(value.at("size").get<Index>());
      std::vector<std::string> dict;
      if (value.contains("values")) {
        dict = value.at("values").get<std::vector<std::string>>();
        if (static_cast<Index>(dict.size()) != sizes.back()) {
          throw std::runtime_error("read_domain_json: '" + name +
                                   "' values list does not match size");
        }
      }
      dicts.push_back(std::move(dict));
    } else {
      throw std::runtime_error("read_domain_json: '" + name +
                               "' must be an integer or an object");
    }
  }
  if (value_dicts) *value_dicts = std::move(dicts);
  return Domain(std::move(names), std::move(sizes));
}

void write_domain_json(const std::string& path, const Domain& domain,
                       const std::vector<std::vector<std::string>>& value_dicts) {
  nlohmann::ordered_json doc;
  for (int i = 0; i < domain.attr_count(); ++i) {
    const auto& dict = value_dicts.at(static_cast<std::size_t>(i));
    if (dict.empty()) {
      doc[domain.name(i)] = domain.size(i);
    } else {
      doc[domain.name(i)] = {{"size", domain.size(i)}, {"values", dict}};
    }
  }
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_domain_json: cannot write '" + path + "'");
  }
  out << doc.dump(2) << "\n";
}

IngestResult ingest_csv(const std::string& csv_path,
                        const std::optional<std::string>& domain_path) {
  const auto rows = read_rows(csv_path);
  const std::vector<std::string>& header = rows.front();
  const std::size_t n_cols = header.size();

  // Collect data rows, dropping any with an empty cell.
  std::vector<const std::vector<std::string>*> data_rows;
  Index dropped_rows = 0;
  std::vector<std::string> log;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != n_cols) {
      throw std::runtime_error("ingest_csv: row " + std::to_string(r) +
                               " has " + std::to_string(rows[r].size()) +
                               " cells, expected " + std::to_string(n_cols));
    }
    const bool has_empty = std::any_of(rows[r].begin(), rows[r].end(),
                                       [](const std::string& c) { return c.empty(); });
    if (has_empty) {
      ++dropped_rows;
      continue;
    }
    data_rows.push_back(&rows[r]);
  }
  if (dropped_rows > 0) {
    log.push_back("dropped " + std::to_string(dropped_rows) +
                  " row(s) with missing values");
  }

  std::vector<std::string> kept_names;
  std::vector<Index> kept_sizes;
  std::vector<std::vector<std::string>> kept_dicts;
  std::vector<std::string> dropped_columns;
  // Per kept column: either a dictionary lookup or direct integer parsing.
  struct ColumnCodec {
    std::size_t source_col;
    std::map<std::string, std::int32_t> lookup;  // empty -> parse as integer
    Index size;
  };
  std::vector<ColumnCodec> codecs;

  if (domain_path) {
    std::vector<std::vector<std::string>> declared_dicts;
    const Domain declared = read_domain_json(*domain_path, &declared_dicts);
    for (std::size_t c = 0; c < n_cols; ++c) {
      if (!declared.has_attr(header[c])) {
        throw std::runtime_error("ingest_csv: column '" + header[c] +
                                 "' is not declared in the domain file");
      }
      const int a = declared.index_of(header[c]);
      ColumnCodec codec{c, {}, declared.size(a)};
      const auto& dict = declared_dicts[static_cast<std::size_t>(a)];
      for (std::size_t v = 0; v < dict.size(); ++v) {
        codec.lookup.emplace(dict[v], static_cast<std::int32_t>(v));
      }
      codecs.push_back(std::move(codec));
      kept_names.push_back(header[c]);
      kept_sizes.push_back(declared.size(a));
      kept_dicts.push_back(dict);
    }
  } else {
    // Infer: first-appearance encoding; constant columns dropped.
    for (std::size_t c = 0; c < n_cols; ++c) {
      ColumnCodec codec{c, {}, 0};
      std::vector<std::string> dict;
      for (const auto* row : data_rows) {
        const std::string& cell = (*row)[c];
        if (codec.lookup.emplace(cell, static_cast<std::int32_t>(dict.size()))
                .second) {
          dict.push_back(cell);
        }
      }
      if (dict.size() < 2) {
        dropped_columns.push_back(header[c]);
        log.push_back("dropped column '" + header[c] +
                      "': fewer than two distinct values");
        continue;
      }
      codec.size = static_cast<Index>(dict.size());
      codecs.push_back(std::move(codec));
      kept_names.push_back(header[c]);
      kept_sizes.push_back(static_cast<Index>(dict.size()));
      kept_dicts.push_back(std::move(dict));
    }
    if (codecs.empty()) {
      throw std::runtime_error("ingest_csv: no usable columns");
    }
  }

  Domain domain(kept_names, kept_sizes);
  DataTable table(domain);
  std::vector<std::int32_t> record(codecs.size());
  for (const auto* row : data_rows) {
    for (std::size_t i = 0; i < codecs.size(); ++i) {
      const ColumnCodec& codec = codecs[i];
      const std::string& cell = (*row)[codec.source_col];
      if (!codec.lookup.empty()) {
        auto it = codec.lookup.find(cell);
        if (it == codec.lookup.end()) {
          throw std::runtime_error("ingest_csv: value '" + cell +
                                   "' outside declared domain of '" +
                                   kept_names[i] + "'");
        }
        record[i] = it->second;
      } else {
        std::int32_t v = 0;
        try {
          v = static_cast<std::int32_t>(std::stol(cell));
        } catch (const std::exception&) {
          throw std::runtime_error("ingest_csv: value '" + cell +
                                   "' of '" + kept_names[i] +
                                   "' is not an integer code");
        }
        if (v < 0 || v >= codec.size) {
          throw std::runtime_error("ingest_csv: value '" + cell +
                                   "' outside declared domain of '" +
                                   kept_names[i] + "'");
        }
        record[i] = v;
      }
    }
    table.add_record(record);
  }

  return IngestResult{std::move(table), std::move(kept_dicts),
                      std::move(dropped_columns), dropped_rows,
                      std::move(log)};
}

std::vector<AttrSet> parse_workload(const std::string& spec,
                                    const Domain& domain) {
  // Shorthand: "all-Kway".
  if (spec.rfind("all-", 0) == 0 && spec.size() > 7 &&
      spec.substr(spec.size() - 3) == "way") {
    const std::string num = spec.substr(4, spec.size() - 7);
    std::size_t pos = 0;
    const int k = std::stoi(num, &pos);
    if (pos != num.size() || k < 1 || k > domain.attr_count()) {
      throw std::invalid_argument("parse_workload: bad shorthand '" + spec + "'");
    }
    // All k-subsets in lexicographic order.
    std::vector<AttrSet> out;
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    while (true) {
      out.emplace_back(idx);
      int i = k - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] ==
                           domain.attr_count() - k + i) {
        --i;
      }
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) {
        idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
    return out;
  }

  std::ifstream in(spec);
  if (!in) {
    throw std::runtime_error("parse_workload: cannot open '" + spec + "'");
  }
  const auto doc = nlohmann::json::parse(in);
  if (!doc.is_array()) {
    throw std::runtime_error("parse_workload: expected a JSON list of name lists");
  }
  std::vector<AttrSet> out;
  for (const auto& entry : doc) {
    std::vector<int> ids;
    for (const auto& name : entry) {
      ids.push_back(domain.index_of(name.get<std::string>()));
    }
    out.emplace_back(std::move(ids));
  }
  if (out.empty()) {
    throw std::runtime_error("parse_workload: empty workload");
  }
  return out;
}

}  // namespace privmarg

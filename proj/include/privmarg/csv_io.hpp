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
// Data ingestion and the on-disk formats: CSV tables, domain JSON, workload
// JSON.

#ifndef PRIVMARG_CSV_IO_HPP
#define PRIVMARG_CSV_IO_HPP

#include <optional>
#include <string>
#include <vector>

#include "privmarg/attrset.hpp"
#include "privmarg/domain.hpp"

namespace privmarg {

struct IngestResult {
  DataTable table;
  /// Per kept column, the category labels in index order. Empty for columns
  /// declared by bare cardinality (values are the integers themselves).
  std::vector<std::vector<std::string>> value_dicts;
  std::vector<std::string> dropped_columns;
  Index dropped_rows = 0;
  std::vector<std::string> log;  // one line per drop
};

/// Reads a header-row CSV into a DataTable.
///
/// With a domain file, every column must be declared there and every value
/// must fall inside its declared domain. Without one, the domain is inferred:
/// values map to 0..n_i-1 in first-appearance order and columns with fewer
/// than two distinct values are dropped. Rows with empty cells are dropped in
/// both modes.
IngestResult ingest_csv(const std::string& csv_path,
                        const std::optional<std::string>& domain_path);

/// Domain JSON: an object mapping attribute name to either a bare integer
/// cardinality or {"size": n, "values": [...]} with the decode dictionary.
Domain read_domain_json(const std::string& path,
                        std::vector<std::vector<std::string>>* value_dicts);

void write_domain_json(const std::string& path, const Domain& domain,
                       const std::vector<std::vector<std::string>>& value_dicts);

/// Workload spec: either the shorthand "all-Kway" (every K-subset of the
/// domain attributes) or a path to a JSON list of attribute-name lists.
/// Order is preserved; it defines the measurement sequence for the
/// fixed-sequence mechanism.
std::vector<AttrSet> parse_workload(const std::string& spec,
                                    const Domain& domain);

}  // namespace privmarg

#endif  // PRIVMARG_CSV_IO_HPP

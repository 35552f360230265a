#pragma once

#include <string>
#include <vector>

#include "dualtier/cache.hpp"
#include "dualtier/csv.hpp"
#include "dualtier/encoding.hpp"
#include "dualtier/matrix.hpp"
#include "dualtier/normalize.hpp"

namespace dualtier {

/// CSV -> encoded dataset: drop configured columns, label-encode categorical
/// features, extract labels by class name, and record the full-file min-max
/// params for the sidecar. Values stay unnormalized in the cache.
inline PreparedDataset prepare_dataset(const std::string& csv_path,
                                       const std::string& label_column,
                                       const std::vector<std::string>& drop) {
  RawTable table = load_csv(csv_path, label_column);
  if (!drop.empty()) table = drop_columns(table, drop);
  if (table.n_rows() == 0) throw DataError(csv_path + ": no data rows");

  PreparedDataset d;
  d.label_column = label_column;
  d.dropped_columns = drop;
  d.encoding = fit_label_encoding(table);
  d.matrix = apply_encoding(table, d.encoding);
  const std::size_t label_idx = table.label_index();
  for (std::size_t c = 0; c < table.n_cols(); ++c) {
    if (c != label_idx) d.feature_names.push_back(table.column_names[c]);
  }
  assert_finite(d.matrix, csv_path);
  d.full_file_norm = fit_minmax(d.matrix);
  return d;
}

}  // namespace dualtier

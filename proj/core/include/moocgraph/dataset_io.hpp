#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "moocgraph/features.hpp"

namespace moocgraph {

// Sparse rows: "label idx:val idx:val ..." with 1-based ascending column
// indices into the feature index. Values use shortest round-trip formatting.
void write_sparse(const Dataset& data, std::ostream& out);

// Feature index sidecar: "idx<TAB>name" per line, 1-based.
void write_feature_index(const std::vector<std::string>& index, std::ostream& out);
std::vector<std::string> read_feature_index(std::istream& in);

// Instance ids sidecar: "sid,courseweek,setup" per line, aligned with rows.
void write_instance_ids(const Dataset& data, std::ostream& out);

// Reads a dataset written by the functions above. Throws IoError on
// malformed content or mismatched row counts.
Dataset read_dataset(std::istream& rows, std::istream& index, std::istream& ids);

// Dense CSV (small fixtures): "sid,courseweek,setup,label,<features...>".
void write_dense_csv(const Dataset& data, std::ostream& out);

std::string format_double(double v);

}  // namespace moocgraph

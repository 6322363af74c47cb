#pragma once

#include "pac/pipeline.hpp"
#include "pac/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace pac {

/// Per-point labels plus the cluster table and run metadata; what `fit` and
/// `stream` write out.
struct LabeledOutput {
    std::vector<int> labels;  // 0-based, contiguous
    Partition partition;
    nlohmann::json metadata;
};

/// Delimiter-separated numeric rows (comma or whitespace); a non-numeric
/// first row is treated as a header and skipped. The dimension is inferred
/// from the first data row and enforced afterwards.
Dataset read_dataset(std::istream& in, const std::string& source_name);
Dataset read_dataset(const std::string& path);

/// Rows with 17 significant digits, comma separated; lossless round trip.
void write_dataset(std::ostream& out, const Dataset& data);
void write_dataset(const std::string& path, const Dataset& data);

/// Input rows plus a final label column.
void write_labeled(std::ostream& out, const Dataset& data, const std::vector<int>& labels);
void write_labeled(const std::string& path, const Dataset& data, const std::vector<int>& labels);

/// Config echo, cluster table, and phase traces for the metadata sidecar.
nlohmann::json result_metadata(const PacConfig& config, const PacResult& result);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

/// One length-prefixed block of CSV rows: a line holding the row count, then
/// that many rows. Returns false at a clean end of stream.
bool read_framed_batch(std::istream& in, Dataset& batch);

}  // namespace pac

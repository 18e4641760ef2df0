#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "icls/experiment.hpp"

namespace icls {

enum class ResultFormat { Csv, Jsonl };

ResultFormat parse_format(std::string_view token);

// Shortest round-trip decimal representation.
std::string format_double(double v);

// Columns: dataset, method, L, U, repeat, error, test_loss, train_seconds, seed.
std::string results_to_csv(const std::vector<RepeatResult>& results);
// One JSON object per line with the same fields as the CSV.
std::string results_to_jsonl(const std::vector<RepeatResult>& results);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);

// Writes to a temporary sibling file and renames it over `path`, so readers
// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace icls

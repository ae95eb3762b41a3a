#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "hyt/data/statement.hpp"

namespace hyt::data {

enum class DatasetFormat {
  automatic,  // pick by file extension
  jsonl,      // {"head":..,"relation":..,"tail":..,"qualifiers":[[qr,qe],..]} per line
  tsv,        // head \t relation \t tail [\t qr \t qe]...
};

/// Accepts "jsonl", "jsonl-statements", "tsv", "tsv-flat", "auto".
DatasetFormat parse_format(std::string_view tag);
std::string_view to_string(DatasetFormat format) noexcept;

/// Loads a dataset.
///
/// `path` is either a single statement file (every statement tagged train) or
/// a directory holding `train`, `valid` and `test` files with a .jsonl, .tsv or
/// .txt extension. Any other data-looking file in the directory is rejected as
/// an unknown split. If `entities.vocab` / `relations.vocab` are present they
/// pin the id mapping; names not listed are appended in first-appearance order.
///
/// Blank lines and lines starting with '#' are skipped. Throws ParseError on a
/// malformed line and std::runtime_error when no statements are found.
KnowledgeGraph load_dataset(const std::filesystem::path& path,
                            DatasetFormat format = DatasetFormat::automatic);

/// Parses one statement record into `graph` (interning names). Returns false
/// for blank/comment lines. Throws std::runtime_error with a short reason on
/// malformed input; callers attach file and line.
bool parse_statement_line(std::string_view line, DatasetFormat format, Split split,
                          KnowledgeGraph& graph);

std::string format_statement(const KnowledgeGraph& graph, const Statement& statement,
                             DatasetFormat format);

/// Writes one file per non-empty split plus the vocabulary manifests.
void save_dataset(const KnowledgeGraph& graph, const std::filesystem::path& dir,
                  DatasetFormat format = DatasetFormat::jsonl);

void write_vocabulary(const Vocabulary& vocab, const std::filesystem::path& file);
/// Reads "name<TAB>id" lines; ids must be 0..n-1 in order.
Vocabulary read_vocabulary(const std::filesystem::path& file);

/// FNV-1a over the dataset's data and vocabulary files (sorted by name), or
/// over the single file.
std::uint64_t dataset_checksum(const std::filesystem::path& path);

}  // namespace hyt::data

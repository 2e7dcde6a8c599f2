#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "actdiag/diagram.hpp"
#include "actdiag/errors.hpp"

namespace actdiag {

class ManifestError : public Error {
 public:
  ManifestError(std::size_t line, const std::string& what)
      : Error("manifest line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct DatasetEntry {
  std::string id;
  std::filesystem::path description_path;
  std::filesystem::path ground_truth_path;
};

/// Line format: `id<TAB>description<TAB>ground_truth`. Lines starting with '#'
/// are comments; `@key value` lines are metadata. Relative paths resolve
/// against the manifest's directory.
struct Manifest {
  std::vector<DatasetEntry> entries;
  std::map<std::string, std::string> metadata;

  /// Parses without touching the referenced files.
  static Manifest parse(std::string_view text, const std::filesystem::path& base_dir);
  /// Parses, then checks that every file exists and every ground truth
  /// parses and validates clean.
  static Manifest load(const std::filesystem::path& path);

  const DatasetEntry* find(std::string_view id) const;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

/// Reads and parses a diagram file, throwing ParseError on malformed content.
ActivityDiagram load_diagram(const std::filesystem::path& path);

}  // namespace actdiag

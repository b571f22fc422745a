#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace wavezar {

using Json = nlohmann::ordered_json;

/// %.17g, with "nan"/"inf" spelled out (never produced by valid runs).
std::string format_number(double x);

/// JSON text with two-space indent, keys in insertion order and every
/// floating-point value printed by format_number.  Ends with a newline.
std::string dump_json(const Json& value);

/// 64-bit FNV-1a as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Comma-joined line ending in LF.
std::string csv_line(const std::vector<std::string>& cells);
std::string csv_line(const std::vector<double>& cells);

struct ArtifactRecord {
  std::string name;
  std::string hash;
  std::size_t bytes = 0;
};

/// Collects artifacts in memory; commit() writes each to a hidden temporary
/// file in the output directory and renames it into place.  If any write
/// fails, files already committed by this writer are removed again.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(std::filesystem::path directory);

  const std::filesystem::path& directory() const { return directory_; }

  /// Replaces an earlier staged artifact of the same name.
  void stage(const std::string& name, std::string content);
  bool staged(const std::string& name) const;
  /// Records in staging order.
  std::vector<ArtifactRecord> records() const;

  void commit();

 private:
  std::filesystem::path directory_;
  std::vector<std::pair<std::string, std::string>> files_;
};

}  // namespace wavezar

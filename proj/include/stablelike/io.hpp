#pragma once

// Output plumbing: FNV-1a digests for parameter fingerprints, deterministic
// number formatting, and atomic file writes (temp file + rename, so reruns
// overwrite cleanly and failures never leave partial outputs).

#include <cstdint>
#include <string>
#include <vector>

namespace stablelike {

std::uint64_t fnv1a64(const std::string& data);
std::string digest_hex(const std::string& data);

// Shortest round-trip decimal form; stable across runs.
std::string format_double(double v);

// Writes `content` to `path` atomically; creates parent directories.
void write_file_atomic(const std::string& path, const std::string& content);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

}  // namespace stablelike

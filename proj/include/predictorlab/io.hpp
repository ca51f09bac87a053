#pragma once

#include <stdexcept>
#include <string>

namespace predictorlab {

// File-system failures (unreadable input, unwritable output).  Kept distinct
// from configuration errors so the CLI can map them to different exit codes.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Write-then-rename so report files are never observed half-written.
void write_file_atomic(const std::string& path, const std::string& content);

// Full double precision (17 significant digits), '.' decimal separator.
std::string g17(double v);

}  // namespace predictorlab

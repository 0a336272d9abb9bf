#pragma once

#include <string>

#include "divsel/common.hpp"

namespace divsel {

enum class MatrixFormat { kCsv, kTsv };

// .tsv / .tab extensions select TSV; everything else CSV.
MatrixFormat format_from_path(const std::string& path);

// Reads a rectangular numeric table ('.' decimal separator).  A single
// leading header row is skipped when its cells are not all numeric.
// Ragged rows, non-numeric cells, and empty files raise with the offending
// line number in the message.
Matrix read_matrix(const std::string& path, MatrixFormat format);

// Writes at 17 significant digits (lossless double round-trip), atomically:
// a temporary file in the same directory is renamed over the target, so a
// failed write never leaves a partial file.
void write_matrix(const std::string& path, const Matrix& m,
                  MatrixFormat format);

// Shared atomic text writer (also used for CLI reports).
void atomic_write_text(const std::string& path, const std::string& content);

}  // namespace divsel

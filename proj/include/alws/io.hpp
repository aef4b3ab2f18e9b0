#pragma once

#include "alws/types.hpp"

#include <string>

namespace alws {

enum class MatrixFormat { csv, binary };

// CSV: rows of comma-separated decimal floats, no header. Binary: magic
// "ALWM", then little-endian u64 row and column counts, then row-major
// little-endian f64 entries. Writers emit doubles with 17 significant
// digits so a CSV round trip is bit-exact.
Matrix read_matrix(const std::string& path, MatrixFormat format);
Matrix read_matrix_auto(const std::string& path); // sniffs the magic bytes
void write_matrix(const Matrix& m, const std::string& path,
                  MatrixFormat format);

// One value per line (a single-column CSV).
Vector read_vector(const std::string& path);
void write_vector(const Vector& v, const std::string& path);

// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

// Writes to `path` via a temporary file and rename, so failed runs leave no
// partial output behind.
void atomic_write_text(const std::string& path, const std::string& contents);

}  // namespace alws

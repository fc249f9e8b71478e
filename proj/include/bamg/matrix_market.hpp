#pragma once

#include <iosfwd>
#include <string>

#include "bamg/sparse.hpp"

namespace bamg {

// MatrixMarket "coordinate real general" I/O, 1-based indices. The reader
// also accepts the integer field (parsed as doubles) and "%"-comment lines;
// anything else (pattern/complex fields, symmetry groups, array format) is
// rejected with a descriptive error. The writer emits entries in row-major
// order with 17 significant digits, so files round-trip bit-exactly.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::string& path);
void write_matrix_market(const SparseMatrix& m, std::ostream& out, const std::string& comment = "");
void write_matrix_market(const SparseMatrix& m, const std::string& path,
                         const std::string& comment = "");

}  // namespace bamg

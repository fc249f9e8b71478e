#include "bamg/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bamg {
namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("MatrixMarket: " + what);
}

}  // namespace

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail("empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::istringstream hdr(line);
  std::string banner, object, format, field, symmetry;
  hdr >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") fail("missing %%MatrixMarket banner, got '" + banner + "'");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") fail("unsupported object '" + object + "' (only matrix)");
  if (format != "coordinate") fail("unsupported format '" + format + "' (only coordinate)");
  if (field != "real" && field != "integer")
    fail("unsupported field '" + field + "' (only real/integer)");
  if (symmetry != "general") fail("unsupported symmetry '" + symmetry + "' (only general)");

  // Skip comments, then read the size line.
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '%') continue;
    break;
  }
  if (!in && line.empty()) fail("missing size line");
  long long nrows = -1, ncols = -1, nnz = -1;
  {
    std::istringstream ss(line);
    if (!(ss >> nrows >> ncols >> nnz)) fail("malformed size line '" + line + "'");
  }
  if (nrows < 0 || ncols < 0 || nnz < 0) fail("negative sizes");
  if (nrows > (1 << 30) || ncols > (1 << 30)) fail("matrix too large for 32-bit indices");

  std::vector<Triplet> ts;
  ts.reserve(static_cast<std::size_t>(nnz));
  for (long long k = 0; k < nnz; ++k) {
    long long i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v))
      fail("unexpected end of data after " + std::to_string(k) + " of " + std::to_string(nnz) +
           " entries");
    if (i < 1 || i > nrows || j < 1 || j > ncols)
      fail("entry (" + std::to_string(i) + ", " + std::to_string(j) +
           ") outside 1-based bounds " + std::to_string(nrows) + "x" + std::to_string(ncols));
    ts.push_back({static_cast<index_t>(i - 1), static_cast<index_t>(j - 1), v});
  }
  return SparseMatrix::from_triplets(static_cast<index_t>(nrows), static_cast<index_t>(ncols),
                                     std::move(ts));
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("cannot open '" + path + "' for reading");
  return read_matrix_market(f);
}

void write_matrix_market(const SparseMatrix& m, std::ostream& out, const std::string& comment) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  if (!comment.empty()) {
    std::istringstream cs(comment);
    std::string cl;
    while (std::getline(cs, cl)) out << "% " << cl << "\n";
  }
  out << m.rows() << " " << m.cols() << " " << m.nnz() << "\n";
  out << std::setprecision(17);
  for (index_t i = 0; i < m.rows(); ++i) {
    auto cols = m.row_cols(i);
    auto vals = m.row_vals(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      out << (i + 1) << " " << (cols[k] + 1) << " " << vals[k] << "\n";
  }
  if (!out) fail("write failed");
}

void write_matrix_market(const SparseMatrix& m, const std::string& path,
                         const std::string& comment) {
  std::ofstream f(path);
  if (!f) fail("cannot open '" + path + "' for writing");
  write_matrix_market(m, f, comment);
}

}  // namespace bamg

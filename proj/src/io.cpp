#include "twogrid/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace twogrid {

namespace {

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
    return r;
  }
  return v;
}

}  // namespace

void write_matrix_market(const std::string& path, const SparseMatrix& A) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << A.rows() << " " << A.cols() << " " << A.nonZeros() << "\n";
  out.precision(17);
  for (int r = 0; r < A.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(A, r); it; ++it) {
      out << (it.row() + 1) << " " << (it.col() + 1) << " " << it.value() << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

SparseMatrix read_matrix_market(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || object != "matrix" || format != "coordinate" ||
      (field != "real" && field != "integer") || symmetry != "general") {
    throw std::runtime_error(path + ": only 'matrix coordinate real general' Matrix Market files are supported");
  }
  while (std::getline(in, line) && (line.empty() || line[0] == '%')) {
  }
  long rows = 0, cols = 0, nnz = 0;
  std::istringstream size_line(line);
  if (!(size_line >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
    throw std::runtime_error(path + ": malformed size line");
  }
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  for (long k = 0; k < nnz; ++k) {
    long r = 0, c = 0;
    double v = 0.0;
    if (!(in >> r >> c >> v) || r < 1 || r > rows || c < 1 || c > cols) {
      throw std::runtime_error(path + ": malformed entry " + std::to_string(k + 1));
    }
    triplets.emplace_back(static_cast<int>(r - 1), static_cast<int>(c - 1), v);
  }
  SparseMatrix A(rows, cols);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return A;
}

void write_vector(const std::string& path, const Vector& v) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << kVectorMagic << " " << v.size() << "\n";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto bits = to_little_endian(std::bit_cast<std::uint64_t>(v[i]));
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

Vector read_vector(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic;
  long n = -1;
  if (!(hs >> magic >> n) || magic != kVectorMagic || n < 0) {
    throw std::runtime_error(path + ": bad vector header");
  }
  Vector v(n);
  for (long i = 0; i < n; ++i) {
    char buf[8];
    if (!in.read(buf, 8)) throw std::runtime_error(path + ": truncated vector data");
    std::uint64_t bits = 0;
    std::memcpy(&bits, buf, 8);
    v[i] = std::bit_cast<double>(to_little_endian(bits));
  }
  return v;
}

}  // namespace twogrid

#pragma once

// File formats:
//  - sparse matrices: Matrix Market "coordinate real general", 1-based;
//  - vectors: one ASCII header line "TWOGRIDVEC <length>\n" followed by
//    <length> little-endian IEEE-754 doubles.

#include <string>

#include "twogrid/objective.hpp"

namespace twogrid {

inline constexpr const char* kVectorMagic = "TWOGRIDVEC";

void write_matrix_market(const std::string& path, const SparseMatrix& A);
SparseMatrix read_matrix_market(const std::string& path);

void write_vector(const std::string& path, const Vector& v);
Vector read_vector(const std::string& path);

}  // namespace twogrid

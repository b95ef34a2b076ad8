#pragma once

#include "mfcas/field.hpp"

#include <optional>
#include <vector>

namespace mfcas {

using FRow = std::vector<FieldElement>;
using FMat = std::vector<FRow>;

/// Row echelon form in place; returns pivot columns. Destroys `m`.
std::vector<size_t> row_echelon(FMat& m);

long rank(FMat m);

/// Kernel basis of m (as column vectors of length ncols).
std::vector<FRow> kernel_basis(FMat m, size_t ncols);

/// Solve A x = b; returns one solution or nullopt.
std::optional<FRow> solve_linear(FMat A, FRow b);

/// True iff the square matrix is invertible.
bool invertible(FMat m);

}  // namespace mfcas

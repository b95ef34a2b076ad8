#include "mfcas/linalg.hpp"

namespace mfcas {

std::vector<size_t> row_echelon(FMat& m) {
    std::vector<size_t> pivots;
    if (m.empty()) return pivots;
    size_t ncols = m[0].size();
    size_t row = 0;
    for (size_t col = 0; col < ncols && row < m.size(); ++col) {
        size_t sel = m.size();
        for (size_t r = row; r < m.size(); ++r) {
            if (!m[r][col].is_zero()) {
                sel = r;
                // prefer rational pivots, they keep eliminations cheap
                if (m[r][col].is_rational()) break;
            }
        }
        if (sel == m.size()) continue;
        std::swap(m[row], m[sel]);
        FieldElement inv = m[row][col].inverse();
        for (size_t c = col; c < ncols; ++c) m[row][c] *= inv;
        for (size_t r = 0; r < m.size(); ++r) {
            if (r == row || m[r][col].is_zero()) continue;
            FieldElement f = m[r][col];
            for (size_t c = col; c < ncols; ++c) m[r][c] -= f * m[row][c];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

long rank(FMat m) { return static_cast<long>(row_echelon(m).size()); }

std::vector<FRow> kernel_basis(FMat m, size_t ncols) {
    if (m.empty()) {
        // everything is in the kernel
        std::vector<FRow> basis;
        for (size_t j = 0; j < ncols; ++j) {
            FRow v(ncols, FieldElement());
            v[j] = FieldElement(Rat(1));
            basis.push_back(std::move(v));
        }
        return basis;
    }
    auto field = [&]() -> FieldPtr {
        for (auto& row : m)
            for (auto& x : row)
                if (!x.is_zero()) return x.field();
        return NumberField::rationals();
    }();
    std::vector<size_t> pivots = row_echelon(m);
    std::vector<bool> is_pivot(ncols, false);
    for (size_t p : pivots) is_pivot[p] = true;
    std::vector<FRow> basis;
    for (size_t j = 0; j < ncols; ++j) {
        if (is_pivot[j]) continue;
        FRow v(ncols, field->zero());
        v[j] = field->one();
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][j];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<FRow> solve_linear(FMat A, FRow b) {
    size_t nrows = A.size();
    size_t ncols = nrows ? A[0].size() : 0;
    for (size_t r = 0; r < nrows; ++r) A[r].push_back(b[r]);
    FMat aug = std::move(A);
    std::vector<size_t> pivots = row_echelon(aug);
    auto field = [&]() -> FieldPtr {
        for (auto& row : aug)
            for (auto& x : row)
                if (!x.is_zero()) return x.field();
        return NumberField::rationals();
    }();
    // inconsistent iff a pivot lands in the RHS column
    for (size_t p : pivots)
        if (p == ncols) return std::nullopt;
    FRow x(ncols, field->zero());
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug[r][ncols];
    return x;
}

bool invertible(FMat m) {
    size_t n = m.size();
    if (n == 0) return true;
    if (m[0].size() != n) return false;
    return rank(std::move(m)) == static_cast<long>(n);
}

}  // namespace mfcas

#pragma once

#include <cstdint>
#include <vector>

#include "retroscatter/measure.hpp"

namespace retroscatter
{

//! Symmetric matrix of nonnegative integers, row-major.
struct SymmetricIntMatrix
{
    int order = 0;
    std::vector<std::int64_t> entries;

    SymmetricIntMatrix() = default;
    explicit SymmetricIntMatrix(int m) : order(m), entries(std::size_t(m) * m, 0) {}
    SymmetricIntMatrix(int m, std::vector<std::int64_t> values);

    std::int64_t& at(int i, int j) { return entries[std::size_t(i) * order + j]; }
    std::int64_t at(int i, int j) const { return entries[std::size_t(i) * order + j]; }
    std::int64_t row_sum(int i) const;

    //! Throws NotSymmetric or NegativeEntry.
    void validate() const;
};

//! 0/1 matrix with at most one 1 per row, stored as the column of each row
//! (-1 for an empty row), partitioned into square blocks.
struct BlockPermutationMatrix
{
    std::vector<int> block_sizes;
    std::vector<std::int64_t> col_of_row;

    std::int64_t order() const { return static_cast<std::int64_t>(col_of_row.size()); }
    int block_count() const { return static_cast<int>(block_sizes.size()); }
    //! First row (and column) of each block, plus the total order at the end.
    std::vector<std::int64_t> block_offsets() const;
    bool entry(std::int64_t row, std::int64_t col) const { return col_of_row[row] == col; }
    //! Number of ones in block B_ij.
    std::int64_t block_sum(int i, int j) const;
};

//! Inductive block construction: B_11 starts with a_11 diagonal ones, each
//! B_1j gets a staircase of a_1j ones below them, B_j1 is its transpose and
//! the remaining blocks come from the same construction on the minor.
BlockPermutationMatrix discretize_matrix(SymmetricIntMatrix const& a);

//! Replace every 0 by a 2x2 zero block and every 1 by the 2x2 identity.
BlockPermutationMatrix double_matrix(BlockPermutationMatrix const& b);

//! Read sigma(i) as the column of the 1 in row i. Throws
//! NotPermutationMatrix, NotInvolution, or ForbiddenCorner.
Involution matrix_to_involution(BlockPermutationMatrix const& d);

struct InvolutionApproximation
{
    Involution sigma = Involution::identity(2);
    //! Masses of nu^sigma on the supercells of the input resolution.
    MeasureGrid grid;
    //! Largest cellwise deviation from the input grid.
    double error = 0;
    //! Common denominator N; sigma acts on 4N cells.
    std::int64_t denominator = 0;
    SymmetricIntMatrix counts;
};

//! Rationalize the cells of g below their masses within n^-4 using the least
//! common denominator N <= denominator_cap, then build sigma through
//! discretize_matrix, double_matrix and matrix_to_involution.
InvolutionApproximation approximate_by_involution(MeasureGrid const& g,
                                                  std::int64_t denominator_cap);

}  // namespace retroscatter

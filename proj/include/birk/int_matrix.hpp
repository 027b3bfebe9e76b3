#pragma once

// Exact integer matrices for the graph and chart computations. Entries are
// small (0, +-1 for incidence and loop matrices), but every operation checks
// for overflow instead of assuming it.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace birk {

using Rational = boost::rational<std::int64_t>;

class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
    IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    std::int64_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    std::int64_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    IntMatrix transpose() const;
    IntMatrix column(std::size_t c) const;
    IntMatrix select_rows(const std::vector<std::size_t>& rows) const;
    bool is_zero() const;

    friend bool operator==(const IntMatrix&, const IntMatrix&) = default;
    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);

    /// Rows of space-separated integers, one per line.
    std::string to_text() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::int64_t> data_;
};

/// Rank over the rationals by fraction-free (Bareiss) elimination.
std::size_t rank(const IntMatrix& m);

/// Determinant of a square matrix by Bareiss elimination.
std::int64_t determinant(const IntMatrix& m);

/// Solves m * y = rhs exactly. Returns nullopt when rhs is not in the column
/// space. When m has dependent columns, free unknowns are set to zero.
std::optional<std::vector<Rational>> solve_exact(const IntMatrix& m, const std::vector<Rational>& rhs);

/// True iff every column of `sub` is an integer combination of the columns
/// of `basis` (basis must have full column rank).
bool integer_column_span_contains(const IntMatrix& basis, const IntMatrix& sub);

/// Integer basis of the right kernel {y : m y = 0}, one vector per column,
/// each scaled to coprime integer entries.
IntMatrix integer_kernel(const IntMatrix& m);

}  // namespace birk

#include "birk/int_matrix.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace birk {

namespace {

std::int64_t checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("integer matrix entry overflow");
    return static_cast<std::int64_t>(v);
}

// Reduced row echelon form over the rationals. Returns pivot columns.
std::vector<std::size_t> rref(std::vector<std::vector<Rational>>& a, std::size_t ncols) {
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t c = 0; c < ncols && row < a.size(); ++c) {
        std::size_t p = row;
        while (p < a.size() && a[p][c].numerator() == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[row]);
        Rational inv = Rational(1) / a[row][c];
        for (auto& v : a[row]) v *= inv;
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (r == row || a[r][c].numerator() == 0) continue;
            Rational f = a[r][c];
            for (std::size_t k = 0; k < a[r].size(); ++k) a[r][k] -= f * a[row][k];
        }
        pivots.push_back(c);
        ++row;
    }
    return pivots;
}

std::vector<std::vector<Rational>> to_rational(const IntMatrix& m) {
    std::vector<std::vector<Rational>> a(m.rows(), std::vector<Rational>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) a[r][c] = m(r, c);
    return a;
}

}  // namespace

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

IntMatrix IntMatrix::column(std::size_t c) const {
    IntMatrix out(rows_, 1);
    for (std::size_t r = 0; r < rows_; ++r) out(r, 0) = (*this)(r, c);
    return out;
}

IntMatrix IntMatrix::select_rows(const std::vector<std::size_t>& rows) const {
    IntMatrix out(rows.size(), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < cols_; ++c) out(i, c) = (*this)(rows[i], c);
    return out;
}

bool IntMatrix::is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](std::int64_t v) { return v == 0; });
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix dimension mismatch in product");
    IntMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            __int128 s = 0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += static_cast<__int128>(a(i, k)) * b(k, j);
            out(i, j) = checked(s);
        }
    return out;
}

std::string IntMatrix::to_text() const {
    std::ostringstream out;
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) out << (c ? " " : "") << (*this)(r, c);
        out << "\n";
    }
    return out.str();
}

std::size_t rank(const IntMatrix& m) {
    // Bareiss: every intermediate entry is a minor of m, so division is exact.
    std::vector<std::int64_t> a(m.rows() * m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) a[r * m.cols() + c] = m(r, c);
    auto at = [&](std::size_t r, std::size_t c) -> std::int64_t& { return a[r * m.cols() + c]; };

    std::int64_t prev = 1;
    std::size_t row = 0;
    for (std::size_t c = 0; c < m.cols() && row < m.rows(); ++c) {
        std::size_t p = row;
        while (p < m.rows() && at(p, c) == 0) ++p;
        if (p == m.rows()) continue;
        if (p != row)
            for (std::size_t k = 0; k < m.cols(); ++k) std::swap(at(p, k), at(row, k));
        for (std::size_t r = row + 1; r < m.rows(); ++r) {
            for (std::size_t k = c + 1; k < m.cols(); ++k) {
                __int128 v = static_cast<__int128>(at(row, c)) * at(r, k) - static_cast<__int128>(at(r, c)) * at(row, k);
                at(r, k) = checked(v / prev);
            }
            at(r, c) = 0;
        }
        prev = at(row, c);
        ++row;
    }
    return row;
}

std::int64_t determinant(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
    std::size_t n = m.rows();
    if (n == 0) return 1;
    IntMatrix a = m;
    std::int64_t prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a(p, k) == 0) ++p;
        if (p == n) return 0;
        if (p != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a(p, c), a(k, c));
            sign = -sign;
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            for (std::size_t c = k + 1; c < n; ++c) {
                __int128 v = static_cast<__int128>(a(k, k)) * a(r, c) - static_cast<__int128>(a(r, k)) * a(k, c);
                a(r, c) = checked(v / prev);
            }
            a(r, k) = 0;
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

std::optional<std::vector<Rational>> solve_exact(const IntMatrix& m, const std::vector<Rational>& rhs) {
    if (rhs.size() != m.rows()) throw std::invalid_argument("rhs length mismatch");
    auto a = to_rational(m);
    for (std::size_t r = 0; r < m.rows(); ++r) a[r].push_back(rhs[r]);
    auto pivots = rref(a, m.cols());
    for (std::size_t r = pivots.size(); r < a.size(); ++r)
        if (a[r][m.cols()].numerator() != 0) return std::nullopt;
    std::vector<Rational> y(m.cols(), Rational(0));
    for (std::size_t i = 0; i < pivots.size(); ++i) y[pivots[i]] = a[i][m.cols()];
    return y;
}

bool integer_column_span_contains(const IntMatrix& basis, const IntMatrix& sub) {
    if (basis.rows() != sub.rows()) return false;
    if (rank(basis) != basis.cols()) throw std::invalid_argument("basis must have full column rank");
    for (std::size_t c = 0; c < sub.cols(); ++c) {
        std::vector<Rational> rhs(sub.rows());
        for (std::size_t r = 0; r < sub.rows(); ++r) rhs[r] = sub(r, c);
        auto y = solve_exact(basis, rhs);
        if (!y) return false;
        for (const auto& v : *y)
            if (v.denominator() != 1) return false;
    }
    return true;
}

IntMatrix integer_kernel(const IntMatrix& m) {
    auto a = to_rational(m);
    auto pivots = rref(a, m.cols());
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : pivots) is_pivot[p] = true;

    std::vector<std::vector<Rational>> vecs;
    for (std::size_t f = 0; f < m.cols(); ++f) {
        if (is_pivot[f]) continue;
        std::vector<Rational> v(m.cols(), Rational(0));
        v[f] = 1;
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -a[i][f];
        vecs.push_back(std::move(v));
    }
    IntMatrix out(m.cols(), vecs.size());
    for (std::size_t k = 0; k < vecs.size(); ++k) {
        std::int64_t l = 1;
        for (const auto& v : vecs[k]) l = std::lcm(l, v.denominator());
        std::int64_t g = 0;
        for (const auto& v : vecs[k]) g = std::gcd(g, (v * l).numerator());
        if (g == 0) g = 1;
        for (std::size_t r = 0; r < m.cols(); ++r) out(r, k) = (vecs[k][r] * l).numerator() / g;
    }
    return out;
}

}  // namespace birk

#include "etsim/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace etsim {

SingularMatrixError::SingularMatrixError(std::size_t pivot)
    : std::runtime_error("singular matrix: no admissible pivot in column " + std::to_string(pivot)),
      pivot_(pivot)
{
}

BandedMatrix::BandedMatrix(std::size_t size, std::size_t lower, std::size_t upper)
    : size_(size), lower_(lower), upper_(upper), data_(size * (2 * lower + upper + 1), 0.0)
{
}

bool BandedMatrix::in_band(std::size_t row, std::size_t col) const noexcept
{
    if (row >= size_ || col >= size_) {
        return false;
    }
    return col + lower_ >= row && col <= row + upper_;
}

double BandedMatrix::operator()(std::size_t row, std::size_t col) const noexcept
{
    if (row >= size_ || col >= size_) {
        return 0.0;
    }
    // Fill-in slots are part of storage but hold zeros before factorization.
    if (col + lower_ < row || col > row + upper_ + lower_) {
        return 0.0;
    }
    return raw(row, col);
}

double& BandedMatrix::at(std::size_t row, std::size_t col)
{
    if (!in_band(row, col)) {
        throw std::out_of_range("entry (" + std::to_string(row) + ", " + std::to_string(col) +
                                ") outside band");
    }
    return raw(row, col);
}

void BandedMatrix::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

void BandedMatrix::zero_row(std::size_t row)
{
    auto first = data_.begin() + static_cast<std::ptrdiff_t>(row * width());
    std::fill(first, first + static_cast<std::ptrdiff_t>(width()), 0.0);
}

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const
{
    std::vector<double> y(size_, 0.0);
    for (std::size_t i = 0; i < size_; ++i) {
        const std::size_t first = i >= lower_ ? i - lower_ : 0;
        const std::size_t last = std::min(size_ - 1, i + upper_);
        double acc = 0.0;
        for (std::size_t j = first; j <= last; ++j) {
            acc += raw(i, j) * x[j];
        }
        y[i] = acc;
    }
    return y;
}

std::vector<std::vector<double>> BandedMatrix::to_dense() const
{
    std::vector<std::vector<double>> dense(size_, std::vector<double>(size_, 0.0));
    for (std::size_t i = 0; i < size_; ++i) {
        for (std::size_t j = 0; j < size_; ++j) {
            dense[i][j] = (*this)(i, j);
        }
    }
    return dense;
}

std::size_t BandedMatrix::observed_lower() const noexcept
{
    std::size_t band = 0;
    for (std::size_t i = 0; i < size_; ++i) {
        for (std::size_t d = 1; d <= lower_ && d <= i; ++d) {
            if (raw(i, i - d) != 0.0) {
                band = std::max(band, d);
            }
        }
    }
    return band;
}

std::size_t BandedMatrix::observed_upper() const noexcept
{
    std::size_t band = 0;
    for (std::size_t i = 0; i < size_; ++i) {
        for (std::size_t d = 1; d <= upper_ && i + d < size_; ++d) {
            if (raw(i, i + d) != 0.0) {
                band = std::max(band, d);
            }
        }
    }
    return band;
}

std::vector<double> banded_solve(BandedMatrix jac, std::vector<double> rhs)
{
    const std::size_t n = jac.size();
    if (rhs.size() != n) {
        throw std::invalid_argument("banded_solve: right-hand side has size " +
                                    std::to_string(rhs.size()) + ", matrix has " +
                                    std::to_string(n));
    }
    const std::size_t kl = jac.lower_;
    const std::size_t reach = jac.upper_ + kl;  // upper bandwidth of U after pivoting

    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t last_row = std::min(n - 1, k + kl);
        const std::size_t last_col = std::min(n - 1, k + reach);

        std::size_t pivot = k;
        double best = std::abs(jac.raw(k, k));
        for (std::size_t r = k + 1; r <= last_row; ++r) {
            const double candidate = std::abs(jac.raw(r, k));
            if (candidate > best) {
                best = candidate;
                pivot = r;
            }
        }
        if (!(best > kPivotTolerance)) {
            throw SingularMatrixError(k);
        }
        if (pivot != k) {
            for (std::size_t j = k; j <= last_col; ++j) {
                std::swap(jac.raw(k, j), jac.raw(pivot, j));
            }
            std::swap(rhs[k], rhs[pivot]);
        }

        const double diag = jac.raw(k, k);
        for (std::size_t r = k + 1; r <= last_row; ++r) {
            const double factor = jac.raw(r, k) / diag;
            if (factor == 0.0) {
                continue;
            }
            jac.raw(r, k) = 0.0;
            for (std::size_t j = k + 1; j <= last_col; ++j) {
                jac.raw(r, j) -= factor * jac.raw(k, j);
            }
            rhs[r] -= factor * rhs[k];
        }
    }

    for (std::size_t k = n; k-- > 0;) {
        const std::size_t last_col = std::min(n - 1, k + reach);
        double acc = rhs[k];
        for (std::size_t j = k + 1; j <= last_col; ++j) {
            acc -= jac.raw(k, j) * rhs[j];
        }
        rhs[k] = acc / jac.raw(k, k);
    }
    return rhs;
}

}  // namespace etsim

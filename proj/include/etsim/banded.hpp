#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace etsim {

/// Raised by banded_solve when no admissible pivot exists in a column.
class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(std::size_t pivot);
    [[nodiscard]] std::size_t pivot_index() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// Square band matrix with `lower` sub- and `upper` super-diagonals.
///
/// Each row reserves `lower` extra slots to the right of the upper band so
/// that LU factorization with row pivoting can proceed in place.
class BandedMatrix {
public:
    BandedMatrix() = default;
    BandedMatrix(std::size_t size, std::size_t lower, std::size_t upper);

    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] std::size_t lower() const noexcept { return lower_; }
    [[nodiscard]] std::size_t upper() const noexcept { return upper_; }

    [[nodiscard]] bool in_band(std::size_t row, std::size_t col) const noexcept;

    /// Entry access; zero outside the band.
    [[nodiscard]] double operator()(std::size_t row, std::size_t col) const noexcept;
    /// Mutable access; throws std::out_of_range outside the declared band.
    double& at(std::size_t row, std::size_t col);

    void set_zero();
    void zero_row(std::size_t row);

    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
    [[nodiscard]] std::vector<std::vector<double>> to_dense() const;

    /// Largest |col - row| distance below / above the diagonal that holds a
    /// nonzero entry.
    [[nodiscard]] std::size_t observed_lower() const noexcept;
    [[nodiscard]] std::size_t observed_upper() const noexcept;

private:
    friend std::vector<double> banded_solve(BandedMatrix jac, std::vector<double> rhs);

    [[nodiscard]] std::size_t width() const noexcept { return 2 * lower_ + upper_ + 1; }
    [[nodiscard]] double& raw(std::size_t row, std::size_t col) noexcept
    {
        return data_[row * width() + (col + lower_ - row)];
    }
    [[nodiscard]] double raw(std::size_t row, std::size_t col) const noexcept
    {
        return data_[row * width() + (col + lower_ - row)];
    }

    std::size_t size_ = 0;
    std::size_t lower_ = 0;
    std::size_t upper_ = 0;
    std::vector<double> data_;
};

inline constexpr double kPivotTolerance = 1e-14;

/// Solves jac * x = rhs by LU factorization with partial pivoting restricted
/// to the band. Throws SingularMatrixError if a pivot falls below
/// kPivotTolerance in magnitude.
std::vector<double> banded_solve(BandedMatrix jac, std::vector<double> rhs);

}  // namespace etsim

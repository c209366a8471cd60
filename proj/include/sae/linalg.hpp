#pragma once

#include <array>
#include <cstddef>

namespace sae
{

template <std::size_t N>
using Vector = std::array<double, N>;

/// Row-major fixed-size square matrix.
template <std::size_t N>
using Matrix = std::array<std::array<double, N>, N>;

using Vec3 = Vector<3>;
using Mat3 = Matrix<3>;

template <std::size_t N>
constexpr Matrix<N> identity()
{
    Matrix<N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        out[i][i] = 1.0;
    }
    return out;
}

template <std::size_t N>
constexpr Matrix<N> transpose(const Matrix<N>& m)
{
    Matrix<N> out{};
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
            out[i][j] = m[j][i];
        }
    }
    return out;
}

} // namespace sae

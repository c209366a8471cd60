#pragma once

// Derivative-free minimization and curvature utilities used by the day fits.
// Everything is templated on the (small, fixed) dimension.

#include "sae/errors.hpp"
#include "sae/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

namespace sae::optim
{

/// Bound on |logit p| during the search.
inline constexpr double kLogitClamp = 30.0;

struct NaturalParams
{
    double a = 1.0;
    double s = 1.0;
    double p = 0.0;
};

/// (ln a, ln s, logit p) with the logit clamped to [-kLogitClamp, kLogitClamp].
Vec3 to_transformed(const NaturalParams& params);

/// Inverse of to_transformed; clamps the logit component first.
NaturalParams from_transformed(const Vec3& u);

double logit(double p);
double logistic(double u);

template <std::size_t N>
struct OptimResult
{
    Vector<N> argmin{};
    double value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
    /// Largest coordinate distance from the best vertex at termination.
    double diameter = 0.0;
};

struct NelderMeadOptions
{
    double tol = 1e-8;
    int max_iter = 2000;
    /// Initial simplex edge along coordinate j: initial_step * max(1, |start_j|).
    double initial_step = 0.2;
};

/// Nelder-Mead simplex (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
///
/// Stops once the simplex diameter and the spread of objective values are both below
/// `tol`, or after `max_iter` iterations. Non-finite objective values count as +infinity.
/// Throws NumericError if the objective is not finite at `start`.
template <std::size_t N>
OptimResult<N> nelder_mead(const std::function<double(const Vector<N>&)>& objective, const Vector<N>& start,
                           const NelderMeadOptions& options = {})
{
    if (!(options.tol > 0.0)) {
        throw DomainError("nelder_mead: tolerance must be positive");
    }
    auto evaluate = [&](const Vector<N>& x) {
        const double v = objective(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::array<Vector<N>, N + 1> simplex{};
    std::array<double, N + 1> values{};
    simplex[0] = start;
    values[0] = objective(start);
    if (!std::isfinite(values[0])) {
        throw NumericError("nelder_mead: objective is not finite at the starting point");
    }
    for (std::size_t j = 0; j < N; ++j) {
        simplex[j + 1] = start;
        simplex[j + 1][j] += options.initial_step * std::max(1.0, std::abs(start[j]));
        values[j + 1] = evaluate(simplex[j + 1]);
    }

    std::array<std::size_t, N + 1> order{};
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto sort_vertices = [&] {
        std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return values[l] < values[r]; });
    };
    auto diameter = [&] {
        double d = 0.0;
        const auto& best = simplex[order[0]];
        for (std::size_t v = 1; v <= N; ++v) {
            for (std::size_t j = 0; j < N; ++j) {
                d = std::max(d, std::abs(simplex[order[v]][j] - best[j]));
            }
        }
        return d;
    };
    auto along = [](const Vector<N>& from, const Vector<N>& to, double t) {
        Vector<N> out;
        for (std::size_t j = 0; j < N; ++j) {
            out[j] = from[j] + t * (to[j] - from[j]);
        }
        return out;
    };

    OptimResult<N> result;
    int iter = 0;
    for (;; ++iter) {
        sort_vertices();
        const double spread = values[order[N]] - values[order[0]];
        const double diam = diameter();
        if (spread < options.tol && diam < options.tol) {
            result.converged = true;
            break;
        }
        if (iter >= options.max_iter) {
            break;
        }

        Vector<N> centroid{};
        for (std::size_t v = 0; v < N; ++v) {
            for (std::size_t j = 0; j < N; ++j) {
                centroid[j] += simplex[order[v]][j] / static_cast<double>(N);
            }
        }
        const std::size_t worst = order[N];
        const double f_best = values[order[0]];
        const double f_second = values[order[N - 1]];
        const double f_worst = values[worst];

        const Vector<N> reflected = along(centroid, simplex[worst], -1.0);
        const double f_reflected = evaluate(reflected);
        if (f_reflected < f_best) {
            const Vector<N> expanded = along(centroid, simplex[worst], -2.0);
            const double f_expanded = evaluate(expanded);
            if (f_expanded < f_reflected) {
                simplex[worst] = expanded;
                values[worst] = f_expanded;
            }
            else {
                simplex[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if (f_reflected < f_second) {
            simplex[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        if (f_reflected < f_worst) {
            const Vector<N> outside = along(centroid, reflected, 0.5);
            const double f_outside = evaluate(outside);
            if (f_outside <= f_reflected) {
                simplex[worst] = outside;
                values[worst] = f_outside;
                continue;
            }
        }
        else {
            const Vector<N> inside = along(centroid, simplex[worst], 0.5);
            const double f_inside = evaluate(inside);
            if (f_inside < f_worst) {
                simplex[worst] = inside;
                values[worst] = f_inside;
                continue;
            }
        }
        // shrink towards the best vertex
        const Vector<N> best = simplex[order[0]];
        for (std::size_t v = 1; v <= N; ++v) {
            simplex[order[v]] = along(best, simplex[order[v]], 0.5);
            values[order[v]] = evaluate(simplex[order[v]]);
        }
    }
    result.argmin = simplex[order[0]];
    result.value = values[order[0]];
    result.iterations = iter;
    result.diameter = diameter();
    return result;
}

/// Central-difference Hessian with steps h_j = step * (1 + |x_j|), symmetrized.
/// Throws NumericError naming the offending offset if an evaluation is not finite.
template <std::size_t N>
Matrix<N> numeric_hessian(const std::function<double(const Vector<N>&)>& objective, const Vector<N>& point,
                          double step = 1e-4)
{
    Vector<N> h{};
    for (std::size_t j = 0; j < N; ++j) {
        h[j] = step * (1.0 + std::abs(point[j]));
    }
    auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
        Vector<N> x = point;
        x[i] += di * h[i];
        x[j] += dj * h[j];
        const double v = objective(x);
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "numeric_hessian: non-finite objective at offset (";
            for (std::size_t k = 0; k < N; ++k) {
                msg << (k ? ", " : "") << x[k] - point[k];
            }
            msg << ")";
            throw NumericError(msg.str());
        }
        return v;
    };
    const double center = at(0, 0.0, 0, 0.0);

    Matrix<N> hess{};
    for (std::size_t i = 0; i < N; ++i) {
        const double plus = at(i, 1.0, i, 0.0);
        const double minus = at(i, -1.0, i, 0.0);
        hess[i][i] = (plus - 2.0 * center + minus) / (h[i] * h[i]);
        for (std::size_t j = 0; j < i; ++j) {
            const double pp = at(i, 1.0, j, 1.0);
            const double pm = at(i, 1.0, j, -1.0);
            const double mp = at(i, -1.0, j, 1.0);
            const double mm = at(i, -1.0, j, -1.0);
            hess[i][j] = (pp - pm - mp + mm) / (4.0 * h[i] * h[j]);
        }
    }
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            hess[j][i] = hess[i][j];
        }
    }
    return hess;
}

/// Cholesky factor L (lower) of a symmetric matrix, or nothing if it is not positive definite.
template <std::size_t N>
std::optional<Matrix<N>> cholesky(const Matrix<N>& m)
{
    Matrix<N> l{};
    for (std::size_t j = 0; j < N; ++j) {
        double diag = m[j][j];
        for (std::size_t k = 0; k < j; ++k) {
            diag -= l[j][k] * l[j][k];
        }
        if (!(diag > 0.0) || !std::isfinite(diag)) {
            return std::nullopt;
        }
        l[j][j] = std::sqrt(diag);
        for (std::size_t i = j + 1; i < N; ++i) {
            double v = m[i][j];
            for (std::size_t k = 0; k < j; ++k) {
                v -= l[i][k] * l[j][k];
            }
            l[i][j] = v / l[j][j];
        }
    }
    return l;
}

/// Inverse of a symmetric positive definite matrix via Cholesky; nothing when the
/// factorization fails. Throws DomainError if the input is asymmetric beyond 1e-8
/// (relative to its largest entry).
template <std::size_t N>
std::optional<Matrix<N>> invert_spd(const Matrix<N>& m)
{
    double scale = 0.0;
    for (const auto& row : m) {
        for (double v : row) {
            scale = std::max(scale, std::abs(v));
        }
    }
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (std::abs(m[i][j] - m[j][i]) > 1e-8 * std::max(1.0, scale)) {
                throw DomainError("invert_spd: matrix is not symmetric");
            }
        }
    }
    const auto l = cholesky(m);
    if (!l) {
        return std::nullopt;
    }
    // Solve L L^T X = I column by column.
    Matrix<N> inv{};
    for (std::size_t col = 0; col < N; ++col) {
        Vector<N> y{};
        for (std::size_t i = 0; i < N; ++i) {
            double v = (i == col) ? 1.0 : 0.0;
            for (std::size_t k = 0; k < i; ++k) {
                v -= (*l)[i][k] * y[k];
            }
            y[i] = v / (*l)[i][i];
        }
        for (std::size_t ii = N; ii-- > 0;) {
            double v = y[ii];
            for (std::size_t k = ii + 1; k < N; ++k) {
                v -= (*l)[k][ii] * inv[k][col];
            }
            inv[ii][col] = v / (*l)[ii][ii];
        }
    }
    for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double avg = 0.5 * (inv[i][j] + inv[j][i]);
            inv[i][j] = avg;
            inv[j][i] = avg;
        }
    }
    return inv;
}

inline std::optional<Mat3> invert_3x3_spd(const Mat3& m)
{
    return invert_spd<3>(m);
}

} // namespace sae::optim

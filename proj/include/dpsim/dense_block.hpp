#ifndef DPSIM_DENSE_BLOCK_HPP
#define DPSIM_DENSE_BLOCK_HPP

#include "dpsim/block_matrix.hpp"

#include <algorithm>
#include <cmath>

namespace dpsim::dense {

/// Gauss-Jordan inversion of a bs x bs row-major block with partial (row)
/// pivoting. Returns false if a pivot is zero or smaller than `tiny` times
/// the largest entry of the block.
inline bool invert(const double* a, double* inv, int bs, double tiny = 1e-14)
{
    double m[kMaxBlock * kMaxBlock];
    double scale = 0.0;
    for (int i = 0; i < bs * bs; ++i) {
        m[i] = a[i];
        scale = std::max(scale, std::abs(a[i]));
    }
    for (int i = 0; i < bs; ++i)
        for (int j = 0; j < bs; ++j)
            inv[i * bs + j] = i == j ? 1.0 : 0.0;
    if (!(scale > 0.0) || !std::isfinite(scale))
        return false;
    for (int col = 0; col < bs; ++col) {
        int piv = col;
        for (int r = col + 1; r < bs; ++r)
            if (std::abs(m[r * bs + col]) > std::abs(m[piv * bs + col]))
                piv = r;
        if (!(std::abs(m[piv * bs + col]) > tiny * scale))
            return false;
        if (piv != col)
            for (int j = 0; j < bs; ++j) {
                std::swap(m[piv * bs + j], m[col * bs + j]);
                std::swap(inv[piv * bs + j], inv[col * bs + j]);
            }
        const double d = 1.0 / m[col * bs + col];
        for (int j = 0; j < bs; ++j) {
            m[col * bs + j] *= d;
            inv[col * bs + j] *= d;
        }
        // eliminate above and below
        for (int r = 0; r < bs; ++r) {
            if (r == col)
                continue;
            const double f = m[r * bs + col];
            if (f == 0.0)
                continue;
            for (int j = 0; j < bs; ++j) {
                m[r * bs + j] -= f * m[col * bs + j];
                inv[r * bs + j] -= f * inv[col * bs + j];
            }
        }
    }
    return true;
}

/// c = a * b
inline void mul(const double* a, const double* b, double* c, int bs)
{
    for (int i = 0; i < bs; ++i)
        for (int j = 0; j < bs; ++j) {
            double s = 0.0;
            for (int k = 0; k < bs; ++k)
                s += a[i * bs + k] * b[k * bs + j];
            c[i * bs + j] = s;
        }
}

/// c -= a * b
inline void mul_sub(const double* a, const double* b, double* c, int bs)
{
    for (int i = 0; i < bs; ++i)
        for (int j = 0; j < bs; ++j) {
            double s = 0.0;
            for (int k = 0; k < bs; ++k)
                s += a[i * bs + k] * b[k * bs + j];
            c[i * bs + j] -= s;
        }
}

/// y = a * x
inline void matvec(const double* a, const double* x, double* y, int bs)
{
    for (int i = 0; i < bs; ++i) {
        double s = 0.0;
        for (int j = 0; j < bs; ++j)
            s += a[i * bs + j] * x[j];
        y[i] = s;
    }
}

/// y -= a * x
inline void matvec_sub(const double* a, const double* x, double* y, int bs)
{
    for (int i = 0; i < bs; ++i) {
        double s = 0.0;
        for (int j = 0; j < bs; ++j)
            s += a[i * bs + j] * x[j];
        y[i] -= s;
    }
}

}  // namespace dpsim::dense

#endif

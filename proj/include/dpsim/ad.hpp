#ifndef DPSIM_AD_HPP
#define DPSIM_AD_HPP

#include "dpsim/props.hpp"

#include <array>

namespace dpsim {

// Forward-mode value with N directional derivatives. Used locally inside the
// residual kernels so that every Jacobian entry is the exact derivative of
// the residual expression that produced it.
template <int N>
struct Ad {
    double v = 0.0;
    std::array<double, N> d{};

    static Ad constant(double value) { return Ad{value, {}}; }
    static Ad variable(double value, int slot)
    {
        Ad a{value, {}};
        a.d[slot] = 1.0;
        return a;
    }

    Ad& operator+=(const Ad& o)
    {
        v += o.v;
        for (int i = 0; i < N; ++i)
            d[i] += o.d[i];
        return *this;
    }
    Ad& operator-=(const Ad& o)
    {
        v -= o.v;
        for (int i = 0; i < N; ++i)
            d[i] -= o.d[i];
        return *this;
    }
};

template <int N>
Ad<N> operator+(Ad<N> a, const Ad<N>& b)
{
    return a += b;
}

template <int N>
Ad<N> operator-(Ad<N> a, const Ad<N>& b)
{
    return a -= b;
}

template <int N>
Ad<N> operator-(const Ad<N>& a)
{
    Ad<N> r;
    r.v = -a.v;
    for (int i = 0; i < N; ++i)
        r.d[i] = -a.d[i];
    return r;
}

template <int N>
Ad<N> operator*(const Ad<N>& a, const Ad<N>& b)
{
    Ad<N> r;
    r.v = a.v * b.v;
    for (int i = 0; i < N; ++i)
        r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
}

template <int N>
Ad<N> operator*(double s, const Ad<N>& a)
{
    Ad<N> r;
    r.v = s * a.v;
    for (int i = 0; i < N; ++i)
        r.d[i] = s * a.d[i];
    return r;
}

template <int N>
Ad<N> operator*(const Ad<N>& a, double s)
{
    return s * a;
}

template <int N>
Ad<N> operator+(const Ad<N>& a, double s)
{
    Ad<N> r = a;
    r.v += s;
    return r;
}

template <int N>
Ad<N> operator-(double s, const Ad<N>& a)
{
    Ad<N> r = -a;
    r.v += s;
    return r;
}

/// Composes a scalar property f(x) with an Ad argument x.
template <int N>
Ad<N> chain(const ValueDeriv& f, const Ad<N>& x)
{
    Ad<N> r;
    r.v = f.value;
    for (int i = 0; i < N; ++i)
        r.d[i] = f.deriv * x.d[i];
    return r;
}

}  // namespace dpsim

#endif

#pragma once
// Truncated Taylor series ("jets") with coefficient storage a_k = f^(k)(x0)/k!.

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace tfw {

template <class T>
class Jet {
public:
    std::vector<T> c;

    Jet() = default;
    explicit Jet(int order, T value = T(0)) : c(static_cast<std::size_t>(order + 1), T(0)) { c[0] = value; }

    static Jet variable(int order, T x0) {
        Jet j(order, x0);
        if (order >= 1) j.c[1] = T(1);
        return j;
    }
    static Jet from_derivatives(const std::vector<T>& d) {
        Jet j(static_cast<int>(d.size()) - 1);
        double f = 1.0;
        for (std::size_t k = 0; k < d.size(); ++k) {
            if (k > 0) f *= static_cast<double>(k);
            j.c[k] = d[k] / f;
        }
        return j;
    }

    int order() const { return static_cast<int>(c.size()) - 1; }
    T value() const { return c[0]; }

    // D^k f(x0) for k = 0..order
    std::vector<T> derivatives() const {
        std::vector<T> d(c.size());
        double f = 1.0;
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (k > 0) f *= static_cast<double>(k);
            d[k] = c[k] * f;
        }
        return d;
    }
    T derivative(int k) const {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return c[static_cast<std::size_t>(k)] * f;
    }

    // Series of f' truncated to the same order (top coefficient lost).
    Jet diff() const {
        Jet r(order());
        for (int k = 0; k < order(); ++k) r.c[k] = c[k + 1] * T(k + 1);
        return r;
    }
    Jet integrate(T constant) const {
        Jet r(order());
        r.c[0] = constant;
        for (int k = 1; k <= order(); ++k) r.c[k] = c[k - 1] / T(k);
        return r;
    }

    Jet& operator+=(const Jet& o) { for (std::size_t k = 0; k < c.size(); ++k) c[k] += o.c[k]; return *this; }
    Jet& operator-=(const Jet& o) { for (std::size_t k = 0; k < c.size(); ++k) c[k] -= o.c[k]; return *this; }
    Jet& operator*=(T s) { for (auto& v : c) v *= s; return *this; }
    Jet& operator+=(T s) { c[0] += s; return *this; }

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(Jet a, T s) { return a *= s; }
    friend Jet operator*(T s, Jet a) { return a *= s; }
    friend Jet operator+(Jet a, T s) { return a += s; }
    friend Jet operator-(Jet a) { return a *= T(-1); }

    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r(a.order());
        for (int k = 0; k <= a.order(); ++k) {
            T s(0);
            for (int i = 0; i <= k; ++i) s += a.c[i] * b.c[k - i];
            r.c[k] = s;
        }
        return r;
    }
    friend Jet operator/(const Jet& a, const Jet& b) {
        Jet r(a.order());
        for (int k = 0; k <= a.order(); ++k) {
            T s = a.c[k];
            for (int i = 1; i <= k; ++i) s -= b.c[i] * r.c[k - i];
            r.c[k] = s / b.c[0];
        }
        return r;
    }
};

template <class T>
Jet<T> exp(const Jet<T>& a) {
    Jet<T> r(a.order());
    using std::exp;
    r.c[0] = exp(a.c[0]);
    for (int k = 1; k <= a.order(); ++k) {
        T s(0);
        for (int i = 1; i <= k; ++i) s += T(i) * a.c[i] * r.c[k - i];
        r.c[k] = s / T(k);
    }
    return r;
}

template <class T>
Jet<T> log(const Jet<T>& a) {
    Jet<T> r(a.order());
    using std::log;
    r.c[0] = log(a.c[0]);
    for (int k = 1; k <= a.order(); ++k) {
        T s(0);
        for (int i = 1; i < k; ++i) s += T(i) * r.c[i] * a.c[k - i];
        r.c[k] = (a.c[k] - s / T(k)) / a.c[0];
    }
    return r;
}

// a^p for a(x0) != 0
template <class T>
Jet<T> pow(const Jet<T>& a, double p) {
    Jet<T> r(a.order());
    using std::pow;
    r.c[0] = pow(a.c[0], p);
    for (int k = 1; k <= a.order(); ++k) {
        T s(0);
        for (int i = 1; i <= k; ++i) s += (T((p + 1.0) * i) - T(k)) * a.c[i] * r.c[k - i];
        r.c[k] = s / (T(k) * a.c[0]);
    }
    return r;
}

template <class T>
void sincos(const Jet<T>& a, Jet<T>& s, Jet<T>& co) {
    using std::cos;
    using std::sin;
    s = Jet<T>(a.order());
    co = Jet<T>(a.order());
    s.c[0] = sin(a.c[0]);
    co.c[0] = cos(a.c[0]);
    for (int k = 1; k <= a.order(); ++k) {
        T ss(0), cc(0);
        for (int i = 1; i <= k; ++i) {
            ss += T(i) * a.c[i] * co.c[k - i];
            cc += T(i) * a.c[i] * s.c[k - i];
        }
        s.c[k] = ss / T(k);
        co.c[k] = -cc / T(k);
    }
}

template <class T>
Jet<T> atan(const Jet<T>& a) {
    using std::atan;
    Jet<T> one(a.order(), T(1));
    Jet<T> d = a.diff() / (one + a * a);
    return d.integrate(atan(a.c[0]));
}

}  // namespace tfw

#pragma once
// Exact rationals and univariate rational polynomials.

#include <gmpxx.h>

#include <string>
#include <vector>

namespace tfw {

using Rational = mpq_class;

// Polynomial with rational coefficients, c[i] multiplies x^i. Trailing zeros trimmed.
class PolyQ {
public:
    std::vector<Rational> c;

    PolyQ() = default;
    explicit PolyQ(std::vector<Rational> coeffs) : c(std::move(coeffs)) {
        for (auto& v : c) v.canonicalize();
        trim();
    }
    static PolyQ constant(const Rational& v) { return PolyQ(std::vector<Rational>{v}); }
    static PolyQ monomial(int degree, const Rational& v = 1);

    int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
    bool is_zero() const { return c.empty(); }
    Rational coeff(int i) const { return i >= 0 && i < static_cast<int>(c.size()) ? c[i] : Rational(0); }
    Rational eval(const Rational& x) const;
    double eval(double x) const;

    PolyQ& operator+=(const PolyQ& o);
    PolyQ& operator-=(const PolyQ& o);
    PolyQ& operator*=(const Rational& s);
    friend PolyQ operator+(PolyQ a, const PolyQ& b) { return a += b; }
    friend PolyQ operator-(PolyQ a, const PolyQ& b) { return a -= b; }
    friend PolyQ operator*(PolyQ a, const Rational& s) { return a *= s; }
    friend PolyQ operator*(const PolyQ& a, const PolyQ& b);
    friend bool operator==(const PolyQ& a, const PolyQ& b) { return a.c == b.c; }

    // p(x + s)
    PolyQ shifted(const Rational& s) const;
    std::string to_string(const std::string& var) const;

    void trim();
};

// Bernoulli numbers with B_1 = -1/2; n <= 64.
Rational bernoulli(int n);

Rational binomial(int n, int k);

// q(k) = sum_{j<k} p(j), q(0) = 0
PolyQ antidifference(const PolyQ& p);

std::string rational_string(const Rational& r);

}  // namespace tfw

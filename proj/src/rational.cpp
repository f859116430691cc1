#include "tfw/rational.hpp"

#include <mutex>
#include <stdexcept>

namespace tfw {

PolyQ PolyQ::monomial(int degree, const Rational& v) {
    std::vector<Rational> c(static_cast<std::size_t>(degree + 1), Rational(0));
    c[degree] = v;
    return PolyQ(std::move(c));
}

void PolyQ::trim() {
    while (!c.empty() && c.back() == 0) c.pop_back();
}

Rational PolyQ::eval(const Rational& x) const {
    Rational s = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
    return s;
}

double PolyQ::eval(double x) const {
    double s = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + it->get_d();
    return s;
}

PolyQ& PolyQ::operator+=(const PolyQ& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), Rational(0));
    for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
    trim();
    return *this;
}

PolyQ& PolyQ::operator-=(const PolyQ& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), Rational(0));
    for (std::size_t i = 0; i < o.c.size(); ++i) c[i] -= o.c[i];
    trim();
    return *this;
}

PolyQ& PolyQ::operator*=(const Rational& s) {
    for (auto& v : c) v *= s;
    trim();
    return *this;
}

PolyQ operator*(const PolyQ& a, const PolyQ& b) {
    if (a.is_zero() || b.is_zero()) return PolyQ();
    std::vector<Rational> r(a.c.size() + b.c.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.c.size(); ++i)
        for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return PolyQ(std::move(r));
}

PolyQ PolyQ::shifted(const Rational& s) const {
    // Horner in polynomial arithmetic: p(x+s)
    PolyQ lin(std::vector<Rational>{s, Rational(1)});
    PolyQ r;
    for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * lin + PolyQ::constant(*it);
    return r;
}

std::string rational_string(const Rational& r) {
    Rational t = r;
    t.canonicalize();
    return t.get_str();
}

std::string PolyQ::to_string(const std::string& var) const {
    if (c.empty()) return "0";
    std::string out;
    for (int i = degree(); i >= 0; --i) {
        if (c[i] == 0) continue;
        Rational v = c[i];
        bool neg = v < 0;
        if (neg) v = -v;
        if (out.empty()) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        bool unit = v == 1;
        if (!unit || i == 0) out += rational_string(v);
        if (i > 0) {
            if (!unit) out += " ";
            out += var;
            if (i > 1) out += "^" + std::to_string(i);
        }
    }
    return out;
}

Rational binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return Rational(r);
}

Rational bernoulli(int n) {
    static std::mutex mu;
    static std::vector<Rational> cache;
    if (n < 0 || n > 64) throw std::out_of_range("bernoulli: index must be in [0, 64]");
    std::lock_guard<std::mutex> lock(mu);
    if (cache.empty()) {
        cache.resize(65);
        cache[0] = 1;
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        for (int m = 1; m <= 64; ++m) {
            Rational s = 0;
            for (int j = 0; j < m; ++j) s += binomial(m + 1, j) * cache[j];
            cache[m] = -s / Rational(m + 1);
            cache[m].canonicalize();
        }
    }
    return cache[n];
}

PolyQ antidifference(const PolyQ& p) {
    // sum_{j<k} j^d = 1/(d+1) sum_{i=0}^{d} C(d+1,i) B_i k^{d+1-i}
    PolyQ r;
    for (int d = 0; d <= p.degree(); ++d) {
        if (p.c[d] == 0) continue;
        std::vector<Rational> q(static_cast<std::size_t>(d + 2), Rational(0));
        for (int i = 0; i <= d; ++i) q[d + 1 - i] = binomial(d + 1, i) * bernoulli(i) / Rational(d + 1);
        r += PolyQ(std::move(q)) * p.c[d];
    }
    return r;
}

}  // namespace tfw

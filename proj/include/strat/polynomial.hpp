#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "strat/rational.hpp"

namespace strat {

// Desk-scale caps, enforced at parse time.
inline constexpr int kMaxVars = 6;
inline constexpr int kMaxDegree = 12;

using Exponents = std::vector<int>;

inline int exponents_degree(const Exponents& e) {
    int d = 0;
    for (int k : e) d += k;
    return d;
}

// Graded lexicographic order: total degree first, then lex.
struct GradedLexLess {
    bool operator()(const Exponents& a, const Exponents& b) const {
        int da = exponents_degree(a), db = exponents_degree(b);
        if (da != db) return da < db;
        return a < b;
    }
};

// Exact multivariate polynomial with rational coefficients. No zero terms
// are stored; the term map is the canonical form.
class Polynomial {
public:
    using TermMap = std::map<Exponents, Rational, GradedLexLess>;

    Polynomial() : num_vars_(0) {}
    explicit Polynomial(int num_vars) : num_vars_(num_vars) {}

    static Polynomial constant(int num_vars, const Rational& c);
    static Polynomial variable(int num_vars, int index);
    static Polynomial monomial(int num_vars, Exponents e, const Rational& c);

    int num_vars() const { return num_vars_; }
    bool is_zero() const { return terms_.empty(); }
    // -1 for the zero polynomial.
    int total_degree() const;
    const TermMap& terms() const { return terms_; }

    void add_term(const Exponents& e, const Rational& c);

    Polynomial operator-() const;
    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(const Rational& c) const;
    bool operator==(const Polynomial& o) const {
        return num_vars_ == o.num_vars_ && terms_ == o.terms_;
    }

    Polynomial derivative(int var) const;
    // Partial evaluation: substitute an exact value for one variable.
    // The result keeps the same variable slots (exponent 0 in `var`).
    Polynomial substitute(int var, const Rational& value) const;

    double eval(std::span<const double> point) const;
    Rational eval_exact(const std::vector<Rational>& point) const;

    std::string to_string(const std::vector<std::string>& names) const;

private:
    void check_same_vars(const Polynomial& o) const;

    int num_vars_;
    TermMap terms_;
};

using PolyMatrix = std::vector<std::vector<Polynomial>>;

// Entry (i,j) is d f_i / d x_j, computed exactly.
PolyMatrix jacobian(const std::vector<Polynomial>& system);

Polynomial poly_determinant(const PolyMatrix& m);

// All size x size minor determinants, ordered by (row tuple, column tuple)
// lexicographically.
std::vector<Polynomial> minors(const PolyMatrix& m, int size);

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
    std::size_t position;
};

// Grammar: terms `coef*var^exp*...` joined by '+'/'-'; coefficients are
// integers or p/q; exponents are positive integers; implicit coefficient 1
// and exponent 1; whitespace insignificant.
Polynomial parse_polynomial(const std::string& text,
                            const std::vector<std::string>& variables);

}  // namespace strat

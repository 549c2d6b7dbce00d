#include "strat/polynomial.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace strat {

Polynomial Polynomial::constant(int num_vars, const Rational& c) {
    Polynomial p(num_vars);
    p.add_term(Exponents(num_vars, 0), c);
    return p;
}

Polynomial Polynomial::variable(int num_vars, int index) {
    if (index < 0 || index >= num_vars)
        throw std::invalid_argument("variable index out of range");
    Exponents e(num_vars, 0);
    e[index] = 1;
    return monomial(num_vars, e, Rational(1));
}

Polynomial Polynomial::monomial(int num_vars, Exponents e, const Rational& c) {
    if (static_cast<int>(e.size()) != num_vars)
        throw std::invalid_argument("exponent vector length mismatch");
    Polynomial p(num_vars);
    p.add_term(e, c);
    return p;
}

int Polynomial::total_degree() const {
    if (terms_.empty()) return -1;
    // Graded order: the last term has maximal degree.
    return exponents_degree(terms_.rbegin()->first);
}

void Polynomial::add_term(const Exponents& e, const Rational& c) {
    if (static_cast<int>(e.size()) != num_vars_)
        throw std::invalid_argument("exponent vector length mismatch");
    if (c == 0) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
        terms_.emplace(e, c);
    } else {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

void Polynomial::check_same_vars(const Polynomial& o) const {
    if (num_vars_ != o.num_vars_)
        throw std::invalid_argument("polynomials over different variable counts");
}

Polynomial Polynomial::operator-() const {
    Polynomial r(num_vars_);
    for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
    return r;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
    check_same_vars(o);
    Polynomial r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, c);
    return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
    check_same_vars(o);
    Polynomial r = *this;
    for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
    return r;
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
    check_same_vars(o);
    Polynomial r(num_vars_);
    for (const auto& [ea, ca] : terms_) {
        for (const auto& [eb, cb] : o.terms_) {
            Exponents e(num_vars_);
            for (int k = 0; k < num_vars_; ++k) e[k] = ea[k] + eb[k];
            r.add_term(e, ca * cb);
        }
    }
    return r;
}

Polynomial Polynomial::operator*(const Rational& c) const {
    Polynomial r(num_vars_);
    if (c == 0) return r;
    for (const auto& [e, coef] : terms_) r.terms_.emplace(e, coef * c);
    return r;
}

Polynomial Polynomial::derivative(int var) const {
    if (var < 0 || var >= num_vars_)
        throw std::invalid_argument("derivative variable out of range");
    Polynomial r(num_vars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponents d = e;
        d[var] -= 1;
        r.add_term(d, c * Rational(e[var]));
    }
    return r;
}

Polynomial Polynomial::substitute(int var, const Rational& value) const {
    if (var < 0 || var >= num_vars_)
        throw std::invalid_argument("substitute variable out of range");
    Polynomial r(num_vars_);
    for (const auto& [e, c] : terms_) {
        Rational factor = c;
        for (int k = 0; k < e[var]; ++k) factor *= value;
        Exponents d = e;
        d[var] = 0;
        r.add_term(d, factor);
    }
    return r;
}

double Polynomial::eval(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != num_vars_)
        throw std::invalid_argument("evaluation point dimension mismatch");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = to_double(c);
        for (int k = 0; k < num_vars_; ++k)
            for (int j = 0; j < e[k]; ++j) t *= point[k];
        sum += t;
    }
    return sum;
}

Rational Polynomial::eval_exact(const std::vector<Rational>& point) const {
    if (static_cast<int>(point.size()) != num_vars_)
        throw std::invalid_argument("evaluation point dimension mismatch");
    Rational sum(0);
    for (const auto& [e, c] : terms_) {
        Rational t = c;
        for (int k = 0; k < num_vars_; ++k)
            for (int j = 0; j < e[k]; ++j) t *= point[k];
        sum += t;
    }
    return sum;
}

std::string Polynomial::to_string(const std::vector<std::string>& names) const {
    if (static_cast<int>(names.size()) != num_vars_)
        throw std::invalid_argument("variable name list length mismatch");
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    // Print highest graded-lex term first.
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [e, c] = *it;
        Rational a = c;
        if (first) {
            if (a < 0) {
                out << "-";
                a = -a;
            }
        } else {
            out << (a < 0 ? " - " : " + ");
            if (a < 0) a = -a;
        }
        first = false;
        bool has_vars = exponents_degree(e) > 0;
        bool coef_shown = !has_vars || a != 1;
        if (coef_shown) out << rational_to_string(a);
        bool star = coef_shown;
        for (int k = 0; k < num_vars_; ++k) {
            if (e[k] == 0) continue;
            if (star) out << "*";
            out << names[k];
            if (e[k] > 1) out << "^" << e[k];
            star = true;
        }
    }
    return out.str();
}

PolyMatrix jacobian(const std::vector<Polynomial>& system) {
    PolyMatrix j;
    if (system.empty()) return j;
    int n = system.front().num_vars();
    for (const auto& p : system)
        if (p.num_vars() != n)
            throw std::invalid_argument("jacobian: mixed variable counts");
    j.reserve(system.size());
    for (const auto& p : system) {
        std::vector<Polynomial> row;
        row.reserve(n);
        for (int v = 0; v < n; ++v) row.push_back(p.derivative(v));
        j.push_back(std::move(row));
    }
    return j;
}

namespace {

Polynomial det_rec(const PolyMatrix& m, const std::vector<int>& rows,
                   const std::vector<int>& cols) {
    int n = static_cast<int>(rows.size());
    int nv = m[rows[0]][cols[0]].num_vars();
    if (n == 1) return m[rows[0]][cols[0]];
    Polynomial sum(nv);
    std::vector<int> sub_rows(rows.begin() + 1, rows.end());
    for (int k = 0; k < n; ++k) {
        const Polynomial& pivot = m[rows[0]][cols[k]];
        if (pivot.is_zero()) continue;
        std::vector<int> sub_cols;
        sub_cols.reserve(n - 1);
        for (int j = 0; j < n; ++j)
            if (j != k) sub_cols.push_back(cols[j]);
        Polynomial cof = pivot * det_rec(m, sub_rows, sub_cols);
        if (k % 2 == 0)
            sum = sum + cof;
        else
            sum = sum - cof;
    }
    return sum;
}

void combinations(int n, int k, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> c(k);
    for (int i = 0; i < k; ++i) c[i] = i;
    while (true) {
        f(c);
        int i = k - 1;
        while (i >= 0 && c[i] == n - k + i) --i;
        if (i < 0) break;
        ++c[i];
        for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
    }
}

}  // namespace

Polynomial poly_determinant(const PolyMatrix& m) {
    int n = static_cast<int>(m.size());
    if (n == 0 || static_cast<int>(m[0].size()) != n)
        throw std::invalid_argument("determinant of non-square matrix");
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    return det_rec(m, idx, idx);
}

std::vector<Polynomial> minors(const PolyMatrix& m, int size) {
    int rows = static_cast<int>(m.size());
    int cols = rows == 0 ? 0 : static_cast<int>(m[0].size());
    if (size < 1 || size > std::min(rows, cols))
        throw std::invalid_argument("minor size out of range");
    std::vector<Polynomial> out;
    combinations(rows, size, [&](const std::vector<int>& r) {
        combinations(cols, size, [&](const std::vector<int>& c) {
            out.push_back(det_rec(m, r, c));
        });
    });
    return out;
}

namespace {

struct Parser {
    const std::string& text;
    const std::vector<std::string>& vars;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    bool eof() {
        skip_ws();
        return pos >= text.size();
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    BigInt parse_uint() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) throw ParseError("expected integer", start);
        return BigInt(text.substr(start, pos - start));
    }

    std::string parse_name() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        return text.substr(start, pos - start);
    }

    // factor := number | var ('^' uint)?
    void parse_factor(Rational& coef, Exponents& expo) {
        skip_ws();
        std::size_t start = pos;
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            BigInt num = parse_uint();
            if (peek() == '/') {
                ++pos;
                std::size_t dpos = pos;
                BigInt den = parse_uint();
                if (den == 0) throw ParseError("zero denominator literal", dpos);
                coef *= Rational(num, den);
            } else {
                coef *= Rational(num);
            }
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string name = parse_name();
            auto it = std::find(vars.begin(), vars.end(), name);
            if (it == vars.end())
                throw ParseError("unknown variable '" + name + "'", start);
            int index = static_cast<int>(it - vars.begin());
            int exp = 1;
            if (peek() == '^') {
                ++pos;
                std::size_t epos = pos;
                BigInt e = parse_uint();
                if (e <= 0 || e > kMaxDegree)
                    throw ParseError("exponent out of range", epos);
                exp = e.convert_to<int>();
            }
            expo[index] += exp;
            return;
        }
        throw ParseError("unexpected character", pos);
    }

    Polynomial parse() {
        int nv = static_cast<int>(vars.size());
        Polynomial p(nv);
        bool first = true;
        while (!eof()) {
            int sign = 1;
            char c = peek();
            if (c == '+' || c == '-') {
                sign = c == '-' ? -1 : 1;
                ++pos;
            } else if (!first) {
                throw ParseError("expected '+' or '-'", pos);
            }
            Rational coef(sign);
            Exponents expo(nv, 0);
            parse_factor(coef, expo);
            while (peek() == '*') {
                ++pos;
                parse_factor(coef, expo);
            }
            if (exponents_degree(expo) > kMaxDegree)
                throw ParseError("total degree exceeds cap", pos);
            p.add_term(expo, coef);
            first = false;
        }
        if (first) throw ParseError("empty polynomial", 0);
        return p;
    }
};

}  // namespace

Polynomial parse_polynomial(const std::string& text,
                            const std::vector<std::string>& variables) {
    if (static_cast<int>(variables.size()) > kMaxVars)
        throw ParseError("too many variables (cap " + std::to_string(kMaxVars) + ")", 0);
    Parser p{text, variables};
    return p.parse();
}

}  // namespace strat

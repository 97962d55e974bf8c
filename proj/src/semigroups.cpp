#include <ergodiff/semigroups.hpp>

#include <ergodiff/errors.hpp>

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

namespace ergodiff
{

namespace
{

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void trim(std::vector<std::int64_t> &e)
{
    while (!e.empty() && e.back() == 0) {
        e.pop_back();
    }
}

void trim(fq_poly &p)
{
    while (!p.coeffs.empty() && p.coeffs.back() == 0) {
        p.coeffs.pop_back();
    }
}

std::string strip(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) {
        ++b;
    }
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) {
        --e;
    }
    return std::string(s.substr(b, e - b));
}

std::int64_t parse_int64(const std::string &s, std::string_view context)
{
    try {
        std::size_t used = 0;
        const auto v = std::stoll(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception &) {
        throw parse_error(std::string(context) + ": expected an integer, got '" + s + "'");
    }
}

std::size_t prime_index(std::uint64_t p)
{
    const auto &primes = prime_universe();
    const auto it = std::lower_bound(primes.begin(), primes.end(), p);
    if (it == primes.end() || *it != p) {
        throw prime_universe_overflow(std::to_string(p) + " is not one of the first "
                                      + std::to_string(prime_universe_size) + " primes");
    }
    return static_cast<std::size_t>(it - primes.begin());
}

std::vector<std::int64_t> parse_exponent_product(const std::string &body, std::string_view context)
{
    // Either a plain number (integer or a/b) or a product of p^e factors.
    if (body.find('^') == std::string::npos && body.find('*') == std::string::npos) {
        const auto q = parse_rational(body);
        if (sgn(q) <= 0) {
            throw parse_error(std::string(context) + ": expected a positive number");
        }
        auto num = factor_exponents(q.get_num());
        const auto den = factor_exponents(q.get_den());
        num.resize(std::max(num.size(), den.size()), 0);
        for (std::size_t i = 0; i < den.size(); ++i) {
            num[i] -= den[i];
        }
        trim(num);
        return num;
    }
    std::vector<std::int64_t> e;
    std::stringstream ss(body);
    std::string factor;
    while (std::getline(ss, factor, '*')) {
        factor = strip(factor);
        const auto caret = factor.find('^');
        const auto p = parse_int64(factor.substr(0, caret), context);
        const std::int64_t k = caret == std::string::npos ? 1 : parse_int64(factor.substr(caret + 1), context);
        if (p < 2) {
            throw parse_error(std::string(context) + ": bad prime '" + factor + "'");
        }
        const auto idx = prime_index(static_cast<std::uint64_t>(p));
        if (e.size() <= idx) {
            e.resize(idx + 1, 0);
        }
        e[idx] += k;
    }
    trim(e);
    return e;
}

std::string exponent_product_text(const std::vector<std::int64_t> &e)
{
    if (e.empty()) {
        return "1";
    }
    std::string s;
    const auto &primes = prime_universe();
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) {
            continue;
        }
        if (!s.empty()) {
            s += "*";
        }
        s += std::to_string(primes[i]);
        if (e[i] != 1) {
            s += "^" + std::to_string(e[i]);
        }
    }
    return s;
}

bool is_prime(std::uint64_t q)
{
    if (q < 2) {
        return false;
    }
    for (std::uint64_t d = 2; d * d <= q; ++d) {
        if (q % d == 0) {
            return false;
        }
    }
    return true;
}

fq_poly parse_poly(const std::string &text, std::uint32_t q, std::string_view context)
{
    fq_poly p;
    const std::string s = [&] {
        std::string t;
        for (char c : text) {
            if (!std::isspace(static_cast<unsigned char>(c))) {
                t.push_back(c);
            }
        }
        return t;
    }();
    if (s.empty()) {
        throw parse_error(std::string(context) + ": empty polynomial");
    }
    std::size_t pos = 0;
    while (pos < s.size()) {
        bool negative = false;
        if (s[pos] == '+' || s[pos] == '-') {
            negative = s[pos] == '-';
            ++pos;
        }
        std::uint64_t coef = 1;
        bool has_coef = false;
        const auto dstart = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            ++pos;
        }
        if (pos > dstart) {
            coef = std::stoull(s.substr(dstart, pos - dstart));
            has_coef = true;
        }
        if (pos < s.size() && s[pos] == '*') {
            ++pos;
        }
        std::size_t degree = 0;
        if (pos < s.size() && s[pos] == 'x') {
            ++pos;
            degree = 1;
            if (pos < s.size() && s[pos] == '^') {
                ++pos;
                const auto estart = pos;
                while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
                    ++pos;
                }
                if (pos == estart) {
                    throw parse_error(std::string(context) + ": missing exponent in '" + text + "'");
                }
                degree = std::stoull(s.substr(estart, pos - estart));
            }
        } else if (!has_coef) {
            throw parse_error(std::string(context) + ": malformed polynomial '" + text + "'");
        }
        if (pos < s.size() && s[pos] != '+' && s[pos] != '-') {
            throw parse_error(std::string(context) + ": malformed polynomial '" + text + "'");
        }
        if (p.coeffs.size() <= degree) {
            p.coeffs.resize(degree + 1, 0);
        }
        const std::uint64_t c = coef % q;
        const std::uint64_t term = negative ? (q - c) % q : c;
        p.coeffs[degree] = static_cast<std::uint32_t>((p.coeffs[degree] + term) % q);
    }
    trim(p);
    return p;
}

std::string poly_text(const fq_poly &p)
{
    if (p.coeffs.empty()) {
        return "0";
    }
    std::string s;
    for (std::size_t i = p.coeffs.size(); i-- > 0;) {
        const auto c = p.coeffs[i];
        if (c == 0) {
            continue;
        }
        if (!s.empty()) {
            s += "+";
        }
        if (i == 0) {
            s += std::to_string(c);
            continue;
        }
        if (c != 1) {
            s += std::to_string(c) + "*";
        }
        s += "x";
        if (i > 1) {
            s += "^" + std::to_string(i);
        }
    }
    return s;
}

fin_perm compose(const fin_perm &outer, const fin_perm &inner)
{
    // (outer . inner)(k) = outer(inner(k)).
    std::set<std::uint64_t> support;
    for (const auto &[k, v] : outer.moved) {
        support.insert(k);
    }
    for (const auto &[k, v] : inner.moved) {
        support.insert(k);
    }
    auto apply = [](const fin_perm &p, std::uint64_t k) {
        const auto it = p.moved.find(k);
        return it == p.moved.end() ? k : it->second;
    };
    fin_perm out;
    for (auto k : support) {
        const auto v = apply(outer, apply(inner, k));
        if (v != k) {
            out.moved.emplace(k, v);
        }
    }
    return out;
}

fin_perm parse_perm(const std::string &text, std::string_view context)
{
    fin_perm result;
    std::size_t pos = 0;
    std::vector<fin_perm> cycles;
    while (pos < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            continue;
        }
        if (text[pos] != '(') {
            throw parse_error(std::string(context) + ": expected '(' in '" + text + "'");
        }
        const auto close = text.find(')', pos);
        if (close == std::string::npos) {
            throw parse_error(std::string(context) + ": unbalanced cycle in '" + text + "'");
        }
        std::string inner = text.substr(pos + 1, close - pos - 1);
        std::replace(inner.begin(), inner.end(), ',', ' ');
        std::stringstream ss(inner);
        std::vector<std::uint64_t> cycle;
        std::string tok;
        while (ss >> tok) {
            const auto v = parse_int64(tok, context);
            if (v < 1) {
                throw parse_error(std::string(context) + ": permutation points must be positive");
            }
            cycle.push_back(static_cast<std::uint64_t>(v));
        }
        std::set<std::uint64_t> distinct(cycle.begin(), cycle.end());
        if (distinct.size() != cycle.size()) {
            throw parse_error(std::string(context) + ": repeated point in cycle");
        }
        fin_perm c;
        for (std::size_t i = 0; i < cycle.size() && cycle.size() > 1; ++i) {
            c.moved[cycle[i]] = cycle[(i + 1) % cycle.size()];
        }
        cycles.push_back(std::move(c));
        pos = close + 1;
    }
    // Cycles act right to left.
    for (auto it = cycles.rbegin(); it != cycles.rend(); ++it) {
        result = compose(*it, result);
    }
    return result;
}

std::string perm_text(const fin_perm &p)
{
    if (p.moved.empty()) {
        return "()";
    }
    std::set<std::uint64_t> seen;
    std::string s;
    for (const auto &[start, unused] : p.moved) {
        if (seen.count(start)) {
            continue;
        }
        s += "(";
        std::uint64_t k = start;
        bool first = true;
        do {
            seen.insert(k);
            s += (first ? "" : " ") + std::to_string(k);
            first = false;
            k = p.moved.at(k);
        } while (k != start);
        s += ")";
    }
    return s;
}

void require_same_tag(const semigroup_element &x, const semigroup_element &y)
{
    if (x.tag() != y.tag()) {
        throw tag_mismatch("cannot combine " + to_string(x.tag()) + " with " + to_string(y.tag()));
    }
    if (x.tag() == element_tag::poly_heis
        && std::get<poly_heis>(x.variant()).q != std::get<poly_heis>(y.variant()).q) {
        throw tag_mismatch("polyheis elements over different fields");
    }
}

} // namespace

const std::vector<std::uint64_t> &prime_universe()
{
    static const std::vector<std::uint64_t> primes = [] {
        std::vector<std::uint64_t> ps;
        for (std::uint64_t k = 2; ps.size() < prime_universe_size; ++k) {
            if (is_prime(k)) {
                ps.push_back(k);
            }
        }
        return ps;
    }();
    return primes;
}

std::string to_string(element_tag tag)
{
    switch (tag) {
    case element_tag::int_add:
        return "int";
    case element_tag::nat_mul:
        return "natmul";
    case element_tag::q_pos:
        return "qpos";
    case element_tag::heisenberg:
        return "heis";
    case element_tag::fin_perm:
        return "perm";
    case element_tag::poly_heis:
        return "polyheis";
    }
    return "unknown";
}

bool is_group(element_tag tag)
{
    return tag != element_tag::nat_mul;
}

semigroup_element::semigroup_element(variant_type v) : v_(std::move(v))
{
    std::visit(overloaded{
                   [](nat_mul &x) {
                       trim(x.exponents);
                       if (x.exponents.size() > prime_universe_size) {
                           throw prime_universe_overflow("exponent vector longer than the prime universe");
                       }
                       for (auto e : x.exponents) {
                           if (e < 0) {
                               throw std::invalid_argument("natmul exponents must be nonnegative");
                           }
                       }
                   },
                   [](q_pos &x) {
                       trim(x.exponents);
                       if (x.exponents.size() > prime_universe_size) {
                           throw prime_universe_overflow("exponent vector longer than the prime universe");
                       }
                   },
                   [](fin_perm &x) {
                       std::set<std::uint64_t> image;
                       for (auto it = x.moved.begin(); it != x.moved.end();) {
                           if (it->first == it->second) {
                               it = x.moved.erase(it);
                               continue;
                           }
                           image.insert(it->second);
                           ++it;
                       }
                       std::set<std::uint64_t> domain;
                       for (const auto &[k, v] : x.moved) {
                           domain.insert(k);
                       }
                       if (image != domain) {
                           throw std::invalid_argument("perm is not a bijection on its support");
                       }
                   },
                   [](poly_heis &x) {
                       if (!is_prime(x.q)) {
                           throw std::invalid_argument("polyheis: q must be prime");
                       }
                       for (auto *p : {&x.f, &x.g, &x.h}) {
                           for (auto &c : p->coeffs) {
                               c %= x.q;
                           }
                           trim(*p);
                       }
                   },
                   [](auto &) {},
               },
               v_);
}

std::weak_ordering semigroup_element::operator<=>(const semigroup_element &other) const
{
    if (v_.index() != other.v_.index()) {
        return v_.index() <=> other.v_.index();
    }
    return std::visit(
        [&](const auto &x) -> std::weak_ordering {
            using T = std::decay_t<decltype(x)>;
            return x <=> std::get<T>(other.v_);
        },
        v_);
}

semigroup_element semigroup_element::parse(std::string_view text)
{
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw parse_error("element '" + std::string(text) + "' lacks a tag prefix");
    }
    const std::string head(text.substr(0, colon));
    const std::string body = strip(text.substr(colon + 1));
    const std::string context = "element '" + std::string(text) + "'";
    if (head == "int") {
        const auto q = parse_rational(body);
        if (q.get_den() != 1) {
            throw parse_error(context + ": expected an integer");
        }
        return semigroup_element{int_add{q.get_num()}};
    }
    if (head == "natmul") {
        auto e = parse_exponent_product(body, context);
        for (auto v : e) {
            if (v < 0) {
                throw parse_error(context + ": natmul exponents must be nonnegative");
            }
        }
        return semigroup_element{nat_mul{std::move(e)}};
    }
    if (head == "qpos") {
        return semigroup_element{q_pos{parse_exponent_product(body, context)}};
    }
    if (head == "heis") {
        if (body.size() < 2 || body.front() != '(' || body.back() != ')') {
            throw parse_error(context + ": expected heis:(a,b,c)");
        }
        std::stringstream ss(body.substr(1, body.size() - 2));
        std::vector<bigint> parts;
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const auto q = parse_rational(strip(tok));
            if (q.get_den() != 1) {
                throw parse_error(context + ": heis entries must be integers");
            }
            parts.push_back(q.get_num());
        }
        if (parts.size() != 3) {
            throw parse_error(context + ": expected three entries");
        }
        return semigroup_element{heisenberg{parts[0], parts[1], parts[2]}};
    }
    if (head == "perm") {
        return semigroup_element{parse_perm(body, context)};
    }
    if (head == "polyheis") {
        std::map<std::string, std::string> fields;
        std::stringstream ss(body);
        std::string kv;
        while (std::getline(ss, kv, ';')) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                throw parse_error(context + ": expected key=value");
            }
            fields[strip(kv.substr(0, eq))] = strip(kv.substr(eq + 1));
        }
        poly_heis x;
        x.q = fields.count("q") ? static_cast<std::uint32_t>(parse_int64(fields["q"], context)) : 2;
        if (!is_prime(x.q)) {
            throw parse_error(context + ": q must be prime");
        }
        x.f = fields.count("f") ? parse_poly(fields["f"], x.q, context) : fq_poly{};
        x.g = fields.count("g") ? parse_poly(fields["g"], x.q, context) : fq_poly{};
        x.h = fields.count("h") ? parse_poly(fields["h"], x.q, context) : fq_poly{};
        return semigroup_element{x};
    }
    throw parse_error("unknown element tag in '" + std::string(text) + "'");
}

std::string semigroup_element::text() const
{
    return std::visit(overloaded{
                          [](const int_add &x) { return "int:" + x.k.get_str(); },
                          [](const nat_mul &x) { return "natmul:" + exponent_product_text(x.exponents); },
                          [](const q_pos &x) { return "qpos:" + exponent_product_text(x.exponents); },
                          [](const heisenberg &x) {
                              return "heis:(" + x.a.get_str() + "," + x.b.get_str() + "," + x.c.get_str() + ")";
                          },
                          [](const fin_perm &x) { return "perm:" + perm_text(x); },
                          [](const poly_heis &x) {
                              return "polyheis:q=" + std::to_string(x.q) + ";f=" + poly_text(x.f) + ";g="
                                     + poly_text(x.g) + ";h=" + poly_text(x.h);
                          },
                      },
                      v_);
}

std::vector<std::int64_t> factor_exponents(const bigint &n)
{
    if (n < 1) {
        throw std::invalid_argument("factor_exponents: n must be positive");
    }
    bigint rest = n;
    std::vector<std::int64_t> e;
    const auto &primes = prime_universe();
    for (std::size_t i = 0; i < primes.size() && rest > 1; ++i) {
        const bigint p(static_cast<unsigned long>(primes[i]));
        while (mpz_divisible_p(rest.get_mpz_t(), p.get_mpz_t())) {
            rest /= p;
            if (e.size() <= i) {
                e.resize(i + 1, 0);
            }
            ++e[i];
        }
    }
    if (rest != 1) {
        throw prime_universe_overflow(n.get_str() + " has a prime factor outside the first "
                                      + std::to_string(prime_universe_size) + " primes");
    }
    return e;
}

bigint natural_value(const nat_mul &x)
{
    bigint v = 1;
    const auto &primes = prime_universe();
    for (std::size_t i = 0; i < x.exponents.size(); ++i) {
        v *= ipow(bigint(static_cast<unsigned long>(primes[i])), static_cast<unsigned long>(x.exponents[i]));
    }
    return v;
}

rational rational_value(const q_pos &x)
{
    bigint num = 1;
    bigint den = 1;
    const auto &primes = prime_universe();
    for (std::size_t i = 0; i < x.exponents.size(); ++i) {
        const bigint p(static_cast<unsigned long>(primes[i]));
        const auto e = x.exponents[i];
        if (e > 0) {
            num *= ipow(p, static_cast<unsigned long>(e));
        } else if (e < 0) {
            den *= ipow(p, static_cast<unsigned long>(-e));
        }
    }
    return rational(num, den);
}

semigroup_element identity_like(const semigroup_element &x)
{
    return std::visit(overloaded{
                          [](const int_add &) { return semigroup_element{int_add{0}}; },
                          [](const nat_mul &) { return semigroup_element{nat_mul{}}; },
                          [](const q_pos &) { return semigroup_element{q_pos{}}; },
                          [](const heisenberg &) { return semigroup_element{heisenberg{0, 0, 0}}; },
                          [](const fin_perm &) { return semigroup_element{fin_perm{}}; },
                          [](const poly_heis &p) { return semigroup_element{poly_heis{p.q, {}, {}, {}}}; },
                      },
                      x.variant());
}

bool is_identity(const semigroup_element &x)
{
    return x == identity_like(x);
}

fq_poly fq_add(const fq_poly &x, const fq_poly &y, std::uint32_t q)
{
    fq_poly r;
    r.coeffs.assign(std::max(x.coeffs.size(), y.coeffs.size()), 0);
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) {
        const std::uint64_t a = i < x.coeffs.size() ? x.coeffs[i] : 0;
        const std::uint64_t b = i < y.coeffs.size() ? y.coeffs[i] : 0;
        r.coeffs[i] = static_cast<std::uint32_t>((a + b) % q);
    }
    trim(r);
    return r;
}

fq_poly fq_neg(const fq_poly &x, std::uint32_t q)
{
    fq_poly r = x;
    for (auto &c : r.coeffs) {
        c = (q - c) % q;
    }
    trim(r);
    return r;
}

fq_poly fq_mul(const fq_poly &x, const fq_poly &y, std::uint32_t q)
{
    if (x.coeffs.empty() || y.coeffs.empty()) {
        return {};
    }
    std::vector<std::uint64_t> acc(x.coeffs.size() + y.coeffs.size() - 1, 0);
    for (std::size_t i = 0; i < x.coeffs.size(); ++i) {
        for (std::size_t j = 0; j < y.coeffs.size(); ++j) {
            acc[i + j] = (acc[i + j] + static_cast<std::uint64_t>(x.coeffs[i]) * y.coeffs[j]) % q;
        }
    }
    fq_poly r;
    r.coeffs.assign(acc.begin(), acc.end());
    trim(r);
    return r;
}

semigroup_element mul(const semigroup_element &x, const semigroup_element &y)
{
    require_same_tag(x, y);
    return std::visit(
        overloaded{
            [&](const int_add &a) { return semigroup_element{int_add{a.k + std::get<int_add>(y.variant()).k}}; },
            [&](const nat_mul &a) {
                auto e = a.exponents;
                const auto &b = std::get<nat_mul>(y.variant()).exponents;
                e.resize(std::max(e.size(), b.size()), 0);
                for (std::size_t i = 0; i < b.size(); ++i) {
                    e[i] += b[i];
                }
                return semigroup_element{nat_mul{std::move(e)}};
            },
            [&](const q_pos &a) {
                auto e = a.exponents;
                const auto &b = std::get<q_pos>(y.variant()).exponents;
                e.resize(std::max(e.size(), b.size()), 0);
                for (std::size_t i = 0; i < b.size(); ++i) {
                    e[i] += b[i];
                }
                return semigroup_element{q_pos{std::move(e)}};
            },
            [&](const heisenberg &a) {
                const auto &b = std::get<heisenberg>(y.variant());
                return semigroup_element{heisenberg{a.a + b.a, a.b + b.b, a.c + a.a * b.b + b.c}};
            },
            [&](const fin_perm &a) { return semigroup_element{compose(a, std::get<fin_perm>(y.variant()))}; },
            [&](const poly_heis &a) {
                const auto &b = std::get<poly_heis>(y.variant());
                const auto q = a.q;
                return semigroup_element{poly_heis{q, fq_add(a.f, b.f, q), fq_add(a.g, b.g, q),
                                                   fq_add(fq_add(a.h, fq_mul(a.f, b.g, q), q), b.h, q)}};
            },
        },
        x.variant());
}

semigroup_element inv(const semigroup_element &x)
{
    return std::visit(overloaded{
                          [](const int_add &a) { return semigroup_element{int_add{-a.k}}; },
                          [](const nat_mul &) -> semigroup_element {
                              throw not_a_group("(N, *) has no inverses; use qpos");
                          },
                          [](const q_pos &a) {
                              auto e = a.exponents;
                              for (auto &v : e) {
                                  v = -v;
                              }
                              return semigroup_element{q_pos{std::move(e)}};
                          },
                          [](const heisenberg &a) {
                              return semigroup_element{heisenberg{-a.a, -a.b, a.a * a.b - a.c}};
                          },
                          [](const fin_perm &a) {
                              fin_perm r;
                              for (const auto &[k, v] : a.moved) {
                                  r.moved.emplace(v, k);
                              }
                              return semigroup_element{r};
                          },
                          [](const poly_heis &a) {
                              const auto q = a.q;
                              return semigroup_element{poly_heis{q, fq_neg(a.f, q), fq_neg(a.g, q),
                                                                 fq_add(fq_mul(a.f, a.g, q), fq_neg(a.h, q), q)}};
                          },
                      },
                      x.variant());
}

semigroup_element to_group_of_quotients(const semigroup_element &x)
{
    if (const auto *n = std::get_if<nat_mul>(&x.variant())) {
        return semigroup_element{q_pos{n->exponents}};
    }
    return x;
}

std::vector<semigroup_element> left_quotient_set(std::span<const semigroup_element> a,
                                                 std::span<const semigroup_element> b)
{
    std::vector<semigroup_element> out;
    if (a.empty() || b.empty()) {
        return out;
    }
    for (const auto &x : a) {
        require_same_tag(x, a.front());
    }
    for (const auto &y : b) {
        require_same_tag(y, a.front());
    }
    out.reserve(a.size() * b.size());
    if (a.front().tag() == element_tag::nat_mul) {
        for (const auto &x : a) {
            const auto &ax = std::get<nat_mul>(x.variant()).exponents;
            for (const auto &y : b) {
                auto h = std::get<nat_mul>(y.variant()).exponents;
                h.resize(std::max(h.size(), ax.size()), 0);
                bool natural = true;
                for (std::size_t i = 0; i < h.size(); ++i) {
                    h[i] -= i < ax.size() ? ax[i] : 0;
                    natural = natural && h[i] >= 0;
                }
                if (natural) {
                    out.emplace_back(nat_mul{std::move(h)});
                }
            }
        }
    } else {
        for (const auto &x : a) {
            const auto xi = inv(x);
            for (const auto &y : b) {
                out.push_back(mul(xi, y));
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<semigroup_element> right_translate_quotient(std::span<const semigroup_element> a,
                                                        std::span<const semigroup_element> b,
                                                        const semigroup_element &g)
{
    std::vector<semigroup_element> bg;
    bg.reserve(b.size());
    for (const auto &y : b) {
        bg.push_back(mul(y, g));
    }
    return left_quotient_set(a, bg);
}

semigroup_element clear_denominators(std::span<const semigroup_element> f)
{
    std::vector<std::int64_t> g;
    for (const auto &x : f) {
        const auto *q = std::get_if<q_pos>(&x.variant());
        if (q == nullptr) {
            throw tag_mismatch("clear_denominators expects qpos elements");
        }
        if (g.size() < q->exponents.size()) {
            g.resize(q->exponents.size(), 0);
        }
        for (std::size_t i = 0; i < q->exponents.size(); ++i) {
            g[i] = std::max(g[i], -q->exponents[i]);
        }
    }
    return semigroup_element{nat_mul{std::move(g)}};
}

} // namespace ergodiff

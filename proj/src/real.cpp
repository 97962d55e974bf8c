#include <ergodiff/real.hpp>

#include <ergodiff/errors.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

namespace ergodiff
{

mpfr_number::mpfr_number(mpfr_prec_t prec)
{
    mpfr_init2(value_, prec);
    mpfr_set_zero(value_, 1);
}

mpfr_number::mpfr_number(const mpfr_number &other)
{
    mpfr_init2(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
}

mpfr_number::mpfr_number(mpfr_number &&other) noexcept
{
    // mpfr_t is an array type; swap ownership through a fresh init.
    mpfr_init2(value_, MPFR_PREC_MIN);
    mpfr_swap(value_, other.value_);
}

mpfr_number &mpfr_number::operator=(const mpfr_number &other)
{
    if (this != &other) {
        mpfr_set_prec(value_, other.precision());
        mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
}

mpfr_number &mpfr_number::operator=(mpfr_number &&other) noexcept
{
    mpfr_swap(value_, other.value_);
    return *this;
}

mpfr_number::~mpfr_number()
{
    mpfr_clear(value_);
}

rational mpfr_number::to_rational() const
{
    if (!mpfr_number_p(value_)) {
        throw std::domain_error("non-finite interval endpoint");
    }
    rational q;
    mpfr_get_q(q.get_mpq_t(), value_);
    return q;
}

double mpfr_number::to_double() const
{
    return mpfr_get_d(value_, MPFR_RNDN);
}

namespace
{

real_interval make(mpfr_prec_t prec)
{
    return real_interval(prec);
}

mpfr_prec_t joint_prec(const real_interval &a, const real_interval &b)
{
    return std::max(a.precision(), b.precision());
}

} // namespace

real_interval real_interval::point(const rational &q, mpfr_prec_t prec)
{
    real_interval r(prec);
    mpfr_set_q(r.lo.get(), q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi.get(), q.get_mpq_t(), MPFR_RNDU);
    return r;
}

real_interval real_interval::point(const bigint &z, mpfr_prec_t prec)
{
    real_interval r(prec);
    mpfr_set_z(r.lo.get(), z.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi.get(), z.get_mpz_t(), MPFR_RNDU);
    return r;
}

real_interval real_interval::point(long value, mpfr_prec_t prec)
{
    real_interval r(prec);
    mpfr_set_si(r.lo.get(), value, MPFR_RNDD);
    mpfr_set_si(r.hi.get(), value, MPFR_RNDU);
    return r;
}

bool real_interval::is_point() const
{
    return mpfr_equal_p(lo.get(), hi.get()) != 0;
}

bool real_interval::certainly_positive() const
{
    return mpfr_sgn(lo.get()) > 0;
}

bool real_interval::certainly_negative() const
{
    return mpfr_sgn(hi.get()) < 0;
}

bigint real_interval::floor_lo() const
{
    bigint z;
    mpfr_get_z(z.get_mpz_t(), lo.get(), MPFR_RNDD);
    return z;
}

bigint real_interval::floor_hi() const
{
    bigint z;
    mpfr_get_z(z.get_mpz_t(), hi.get(), MPFR_RNDD);
    return z;
}

bool real_interval::floor_is_determined() const
{
    return floor_lo() == floor_hi();
}

double real_interval::midpoint() const
{
    mpfr_number m(precision() + 1);
    mpfr_add(m.get(), lo.get(), hi.get(), MPFR_RNDN);
    mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    return m.to_double();
}

double real_interval::width() const
{
    mpfr_number w(precision());
    mpfr_sub(w.get(), hi.get(), lo.get(), MPFR_RNDU);
    return mpfr_get_d(w.get(), MPFR_RNDU);
}

real_interval operator+(const real_interval &a, const real_interval &b)
{
    auto r = make(joint_prec(a, b));
    mpfr_add(r.lo.get(), a.lo.get(), b.lo.get(), MPFR_RNDD);
    mpfr_add(r.hi.get(), a.hi.get(), b.hi.get(), MPFR_RNDU);
    return r;
}

real_interval operator-(const real_interval &a, const real_interval &b)
{
    auto r = make(joint_prec(a, b));
    mpfr_sub(r.lo.get(), a.lo.get(), b.hi.get(), MPFR_RNDD);
    mpfr_sub(r.hi.get(), a.hi.get(), b.lo.get(), MPFR_RNDU);
    return r;
}

real_interval operator-(const real_interval &a)
{
    auto r = make(a.precision());
    mpfr_neg(r.lo.get(), a.hi.get(), MPFR_RNDD);
    mpfr_neg(r.hi.get(), a.lo.get(), MPFR_RNDU);
    return r;
}

real_interval operator*(const real_interval &a, const real_interval &b)
{
    const auto prec = joint_prec(a, b);
    auto r = make(prec);
    mpfr_number t(prec);
    bool first = true;
    for (const auto *x : {&a.lo, &a.hi}) {
        for (const auto *y : {&b.lo, &b.hi}) {
            mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDD);
            if (first || mpfr_less_p(t.get(), r.lo.get())) {
                mpfr_set(r.lo.get(), t.get(), MPFR_RNDD);
            }
            mpfr_mul(t.get(), x->get(), y->get(), MPFR_RNDU);
            if (first || mpfr_greater_p(t.get(), r.hi.get())) {
                mpfr_set(r.hi.get(), t.get(), MPFR_RNDU);
            }
            first = false;
        }
    }
    return r;
}

real_interval operator/(const real_interval &a, const real_interval &b)
{
    if (!b.certainly_positive() && !b.certainly_negative()) {
        throw std::domain_error("interval division by an interval containing zero");
    }
    const auto prec = joint_prec(a, b);
    auto r = make(prec);
    mpfr_number t(prec);
    bool first = true;
    for (const auto *x : {&a.lo, &a.hi}) {
        for (const auto *y : {&b.lo, &b.hi}) {
            mpfr_div(t.get(), x->get(), y->get(), MPFR_RNDD);
            if (first || mpfr_less_p(t.get(), r.lo.get())) {
                mpfr_set(r.lo.get(), t.get(), MPFR_RNDD);
            }
            mpfr_div(t.get(), x->get(), y->get(), MPFR_RNDU);
            if (first || mpfr_greater_p(t.get(), r.hi.get())) {
                mpfr_set(r.hi.get(), t.get(), MPFR_RNDU);
            }
            first = false;
        }
    }
    return r;
}

real_interval sqrt(const real_interval &a)
{
    if (a.certainly_negative()) {
        throw std::domain_error("sqrt of a negative interval");
    }
    auto r = make(a.precision());
    if (mpfr_sgn(a.lo.get()) < 0) {
        mpfr_set_zero(r.lo.get(), 1);
    } else {
        mpfr_sqrt(r.lo.get(), a.lo.get(), MPFR_RNDD);
    }
    mpfr_sqrt(r.hi.get(), a.hi.get(), MPFR_RNDU);
    return r;
}

real_interval log(const real_interval &a)
{
    if (!a.certainly_positive()) {
        throw std::domain_error("log of an interval that is not positive");
    }
    auto r = make(a.precision());
    mpfr_log(r.lo.get(), a.lo.get(), MPFR_RNDD);
    mpfr_log(r.hi.get(), a.hi.get(), MPFR_RNDU);
    return r;
}

real_interval exp(const real_interval &a)
{
    auto r = make(a.precision());
    mpfr_exp(r.lo.get(), a.lo.get(), MPFR_RNDD);
    mpfr_exp(r.hi.get(), a.hi.get(), MPFR_RNDU);
    return r;
}

real_interval pow(const real_interval &a, const real_interval &b)
{
    if (!a.certainly_positive()) {
        throw std::domain_error("real power of an interval that is not positive");
    }
    // x^y is monotone in each argument for x > 0, so extremes sit at corners.
    const auto prec = joint_prec(a, b);
    auto r = make(prec);
    mpfr_number t(prec);
    bool first = true;
    for (const auto *x : {&a.lo, &a.hi}) {
        for (const auto *y : {&b.lo, &b.hi}) {
            mpfr_pow(t.get(), x->get(), y->get(), MPFR_RNDD);
            if (first || mpfr_less_p(t.get(), r.lo.get())) {
                mpfr_set(r.lo.get(), t.get(), MPFR_RNDD);
            }
            mpfr_pow(t.get(), x->get(), y->get(), MPFR_RNDU);
            if (first || mpfr_greater_p(t.get(), r.hi.get())) {
                mpfr_set(r.hi.get(), t.get(), MPFR_RNDU);
            }
            first = false;
        }
    }
    return r;
}

real_interval pow(const real_interval &a, long exponent)
{
    if (exponent < 0) {
        return real_interval::point(1L, a.precision()) / pow(a, -exponent);
    }
    auto result = real_interval::point(1L, a.precision());
    auto base = a;
    auto e = exponent;
    while (e > 0) {
        if (e & 1) {
            result = result * base;
        }
        e >>= 1;
        if (e > 0) {
            base = base * base;
        }
    }
    // Even powers of an interval straddling zero are nonnegative.
    if (exponent % 2 == 0 && mpfr_sgn(result.lo.get()) < 0) {
        mpfr_set_zero(result.lo.get(), 1);
    }
    return result;
}

real_interval max_with(const real_interval &a, long floor_value)
{
    auto r = a;
    if (mpfr_cmp_si(r.lo.get(), floor_value) < 0) {
        mpfr_set_si(r.lo.get(), floor_value, MPFR_RNDD);
    }
    if (mpfr_cmp_si(r.hi.get(), floor_value) < 0) {
        mpfr_set_si(r.hi.get(), floor_value, MPFR_RNDU);
    }
    return r;
}

real_interval pi_interval(mpfr_prec_t prec)
{
    auto r = make(prec);
    mpfr_const_pi(r.lo.get(), MPFR_RNDD);
    mpfr_const_pi(r.hi.get(), MPFR_RNDU);
    return r;
}

// Expression tree for real constants.
struct real_constant::node {
    enum class kind { number, pi, euler, neg, add, sub, mul, div, pow, sqrt, log, exp };
    kind k;
    rational value;
    std::shared_ptr<const node> lhs;
    std::shared_ptr<const node> rhs;
};

namespace
{

using node_ptr = std::shared_ptr<const real_constant::node>;
using kind = real_constant::node::kind;

node_ptr leaf(kind k, rational v = 0)
{
    return std::make_shared<const real_constant::node>(real_constant::node{k, std::move(v), nullptr, nullptr});
}

node_ptr branch(kind k, node_ptr l, node_ptr r = nullptr)
{
    return std::make_shared<const real_constant::node>(real_constant::node{k, 0, std::move(l), std::move(r)});
}

class constant_parser
{
public:
    explicit constant_parser(std::string_view text) : text_(text) {}

    node_ptr parse()
    {
        auto root = expr();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected character");
        }
        return root;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string &why) const
    {
        throw parse_error("real constant '" + std::string(text_) + "': " + why + " at offset "
                          + std::to_string(pos_));
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    node_ptr expr()
    {
        auto lhs = term();
        while (true) {
            if (accept('+')) {
                lhs = branch(kind::add, lhs, term());
            } else if (accept('-')) {
                lhs = branch(kind::sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    node_ptr term()
    {
        auto lhs = unary();
        while (true) {
            if (accept('*')) {
                lhs = branch(kind::mul, lhs, unary());
            } else if (accept('/')) {
                lhs = branch(kind::div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    node_ptr unary()
    {
        if (accept('-')) {
            return branch(kind::neg, unary());
        }
        if (accept('+')) {
            return unary();
        }
        auto base = atom();
        if (accept('^')) {
            return branch(kind::pow, base, unary());
        }
        return base;
    }

    node_ptr atom()
    {
        skip_ws();
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        if (accept('(')) {
            auto inner = expr();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return inner;
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const auto start = pos_;
            while (pos_ < text_.size()
                   && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
                ++pos_;
            }
            return leaf(kind::number, parse_rational(std::string(text_.substr(start, pos_ - start))));
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const auto start = pos_;
            while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            }
            const auto word = text_.substr(start, pos_ - start);
            if (word == "pi") {
                return leaf(kind::pi);
            }
            if (word == "e") {
                return leaf(kind::euler);
            }
            if (word == "phi") {
                // (1 + sqrt5) / 2
                return branch(kind::div, branch(kind::add, leaf(kind::number, 1), branch(kind::sqrt, leaf(kind::number, 5))),
                              leaf(kind::number, 2));
            }
            if (word == "sqrt" || word == "log" || word == "exp") {
                const auto k = word == "sqrt" ? kind::sqrt : word == "log" ? kind::log : kind::exp;
                skip_ws();
                // sqrtK shorthand, e.g. sqrt2.
                if (k == kind::sqrt && pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                    const auto dstart = pos_;
                    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                        ++pos_;
                    }
                    return branch(kind::sqrt,
                                  leaf(kind::number, parse_rational(std::string(text_.substr(dstart, pos_ - dstart)))));
                }
                if (!accept('(')) {
                    fail("expected '(' after " + std::string(word));
                }
                auto arg = expr();
                if (!accept(')')) {
                    fail("expected ')'");
                }
                return branch(k, arg);
            }
            fail("unknown identifier '" + std::string(word) + "'");
        }
        fail("unexpected character");
    }
};

std::optional<rational> exact_value(const node_ptr &n)
{
    switch (n->k) {
    case kind::number:
        return n->value;
    case kind::neg: {
        auto v = exact_value(n->lhs);
        if (v) {
            return rational(-*v);
        }
        return std::nullopt;
    }
    case kind::add:
    case kind::sub:
    case kind::mul:
    case kind::div: {
        auto a = exact_value(n->lhs);
        auto b = exact_value(n->rhs);
        if (!a || !b) {
            return std::nullopt;
        }
        if (n->k == kind::add) {
            return rational(*a + *b);
        }
        if (n->k == kind::sub) {
            return rational(*a - *b);
        }
        if (n->k == kind::mul) {
            return rational(*a * *b);
        }
        if (sgn(*b) == 0) {
            throw parse_error("division by zero in constant");
        }
        return rational(*a / *b);
    }
    case kind::pow: {
        auto a = exact_value(n->lhs);
        auto b = exact_value(n->rhs);
        if (!a || !b || b->get_den() != 1 || abs(b->get_num()) > 4096) {
            return std::nullopt;
        }
        const long e = b->get_num().get_si();
        const auto ue = static_cast<unsigned long>(e < 0 ? -e : e);
        rational r(ipow(a->get_num(), ue), ipow(a->get_den(), ue));
        if (e < 0) {
            if (sgn(r) == 0) {
                throw parse_error("zero to a negative power in constant");
            }
            r = 1 / r;
        }
        r.canonicalize();
        return r;
    }
    default:
        return std::nullopt;
    }
}

real_interval evaluate(const node_ptr &n, mpfr_prec_t prec)
{
    switch (n->k) {
    case kind::number:
        return real_interval::point(n->value, prec);
    case kind::pi:
        return pi_interval(prec);
    case kind::euler:
        return exp(real_interval::point(1L, prec));
    case kind::neg:
        return -evaluate(n->lhs, prec);
    case kind::add:
        return evaluate(n->lhs, prec) + evaluate(n->rhs, prec);
    case kind::sub:
        return evaluate(n->lhs, prec) - evaluate(n->rhs, prec);
    case kind::mul:
        return evaluate(n->lhs, prec) * evaluate(n->rhs, prec);
    case kind::div:
        return evaluate(n->lhs, prec) / evaluate(n->rhs, prec);
    case kind::pow: {
        auto e = exact_value(n->rhs);
        if (e && e->get_den() == 1 && abs(e->get_num()) <= 4096) {
            return pow(evaluate(n->lhs, prec), e->get_num().get_si());
        }
        return pow(evaluate(n->lhs, prec), evaluate(n->rhs, prec));
    }
    case kind::sqrt:
        return sqrt(evaluate(n->lhs, prec));
    case kind::log:
        return log(evaluate(n->lhs, prec));
    case kind::exp:
        return exp(evaluate(n->lhs, prec));
    }
    throw std::logic_error("unreachable constant node");
}

} // namespace

real_constant::real_constant() : root_(leaf(kind::number, 0)), text_("0"), exact_(rational(0)) {}

real_constant real_constant::parse(std::string_view text)
{
    real_constant c;
    c.root_ = constant_parser(text).parse();
    c.text_ = std::string(text);
    c.exact_ = exact_value(c.root_);
    // Surface domain errors (sqrt of a negative, log of zero) at parse time.
    (void)c.eval(64);
    return c;
}

real_constant real_constant::from_rational(const rational &q)
{
    real_constant c;
    c.root_ = leaf(kind::number, q);
    c.text_ = q.get_str();
    c.exact_ = q;
    return c;
}

real_interval real_constant::eval(mpfr_prec_t prec) const
{
    if (exact_) {
        return real_interval::point(*exact_, prec);
    }
    return evaluate(root_, prec);
}

double real_constant::approx() const
{
    if (exact_) {
        return to_double(*exact_);
    }
    return eval(128).midpoint();
}

} // namespace ergodiff

#include <ergodiff/phase.hpp>

namespace ergodiff
{

phase to_phase(const rational &x)
{
    rational frac = x - rational(floor(x));
    const bigint scaled_num = frac.get_num() << 128;
    bigint q;
    bigint r;
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), scaled_num.get_mpz_t(), frac.get_den_mpz_t());
    return phase{to_u128(q), r == 0};
}

phase to_phase(const real_constant &x)
{
    if (x.exact()) {
        return to_phase(*x.exact());
    }
    const auto iv = x.eval(320);
    const rational lo = iv.lo_rational();
    auto p = to_phase(lo);
    p.exact = false;
    return p;
}

} // namespace ergodiff

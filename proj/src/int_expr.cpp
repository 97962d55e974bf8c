#include <ergodiff/int_expr.hpp>

#include <ergodiff/errors.hpp>

#include <cctype>
#include <limits>

namespace ergodiff
{

struct int_expr::node {
    enum class kind { number, var, neg, add, sub, mul, pow } k;
    bigint value;
    std::shared_ptr<const node> lhs;
    std::shared_ptr<const node> rhs;
};

namespace
{

using node_ptr = std::shared_ptr<const int_expr::node>;
using kind = int_expr::node::kind;

node_ptr make(kind k, node_ptr l = nullptr, node_ptr r = nullptr, bigint v = 0)
{
    return std::make_shared<const int_expr::node>(int_expr::node{k, std::move(v), std::move(l), std::move(r)});
}

class parser
{
public:
    explicit parser(std::string_view s) : s_(s) {}

    node_ptr run()
    {
        auto e = sum();
        skip();
        if (pos_ != s_.size()) {
            fail("trailing input");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string &what) const
    {
        throw parse_error("integer expression '" + std::string(s_) + "': " + what);
    }
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }
    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    node_ptr sum()
    {
        auto e = product();
        for (;;) {
            if (accept('+')) {
                e = make(kind::add, e, product());
            } else if (accept('-')) {
                e = make(kind::sub, e, product());
            } else {
                return e;
            }
        }
    }
    node_ptr product()
    {
        auto e = unary();
        while (accept('*')) {
            e = make(kind::mul, e, unary());
        }
        return e;
    }
    node_ptr unary()
    {
        if (accept('-')) {
            return make(kind::neg, unary());
        }
        return power();
    }
    // Right associative; binds tighter than unary minus on its left.
    node_ptr power()
    {
        auto base = atom();
        if (accept('^')) {
            return make(kind::pow, base, unary());
        }
        return base;
    }
    node_ptr atom()
    {
        skip();
        if (accept('(')) {
            auto e = sum();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return e;
        }
        if (pos_ < s_.size() && s_[pos_] == 'n') {
            ++pos_;
            return make(kind::var);
        }
        const auto start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
        if (pos_ == start) {
            fail("unexpected character at offset " + std::to_string(pos_));
        }
        return make(kind::number, nullptr, nullptr, bigint(std::string(s_.substr(start, pos_ - start))));
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

bigint eval_node(const int_expr::node &e, const bigint &n)
{
    switch (e.k) {
    case kind::number:
        return e.value;
    case kind::var:
        return n;
    case kind::neg:
        return -eval_node(*e.lhs, n);
    case kind::add:
        return eval_node(*e.lhs, n) + eval_node(*e.rhs, n);
    case kind::sub:
        return eval_node(*e.lhs, n) - eval_node(*e.rhs, n);
    case kind::mul:
        return eval_node(*e.lhs, n) * eval_node(*e.rhs, n);
    case kind::pow: {
        const auto ex = eval_node(*e.rhs, n);
        if (ex < 0 || !ex.fits_ulong_p() || ex > 1'000'000) {
            throw std::domain_error("integer expression: exponent " + ex.get_str() + " out of range");
        }
        return ipow(eval_node(*e.lhs, n), ex.get_ui());
    }
    }
    return 0;
}

} // namespace

int_expr int_expr::parse(std::string_view text)
{
    int_expr out;
    out.root_ = parser(text).run();
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out.text_.push_back(c);
        }
    }
    return out;
}

bigint int_expr::eval(const bigint &n) const
{
    return eval_node(*root_, n);
}

} // namespace ergodiff

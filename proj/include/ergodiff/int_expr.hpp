#pragma once

#include <ergodiff/numeric.hpp>

#include <memory>
#include <string>
#include <string_view>

namespace ergodiff
{

// Integer-valued expression in one variable n: integers, n, + - * ^ and
// parentheses. Used for family parameters such as "n^2+n" or "n^n".
class int_expr
{
public:
    struct node;

    static int_expr parse(std::string_view text);

    bigint eval(const bigint &n) const;
    const std::string &text() const noexcept
    {
        return text_;
    }

private:
    std::shared_ptr<const node> root_;
    std::string text_;
};

} // namespace ergodiff

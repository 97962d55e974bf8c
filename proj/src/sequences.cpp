#include <ergodiff/sequences.hpp>

#include <ergodiff/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
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

std::vector<std::string> split(std::string_view text, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

unsigned long parse_ulong(const std::string &s, std::string_view context)
{
    const auto q = parse_rational(s);
    if (q.get_den() != 1 || sgn(q) < 0 || !q.get_num().fits_ulong_p()) {
        throw parse_error(std::string(context) + ": expected a natural number, got '" + s + "'");
    }
    return q.get_num().get_ui();
}

rational_power make_rational_power(const rational &exponent)
{
    if (sgn(exponent) < 0 || !exponent.get_num().fits_ulong_p() || !exponent.get_den().fits_ulong_p()) {
        throw std::invalid_argument("power exponent must be a nonnegative rational, got " + exponent.get_str());
    }
    return rational_power{exponent.get_num().get_ui(), exponent.get_den().get_ui()};
}

// Integer path representation x = A + B * R^(1/q).
struct radical_form {
    bigint a;
    bigint b;
    bigint r;
    unsigned long q;
};

radical_form radical_of(const sequence_spec &spec, std::uint64_t n)
{
    const bigint nn(static_cast<unsigned long>(n));
    if (const auto *rp = std::get_if<rational_power>(&spec.variant())) {
        return radical_form{0, 1, ipow(nn, rp->p), rp->q};
    }
    if (const auto *as = std::get_if<affine_sqrt>(&spec.variant())) {
        return radical_form{bigint(as->a) * nn, bigint(as->b), nn, 2};
    }
    throw std::logic_error("sequence has no integer evaluation path");
}

// floor(c * R^(1/q)) for any integer c, together with exactness.
std::pair<bigint, bool> floor_scaled_root(const bigint &c, const bigint &r, unsigned long q)
{
    const bigint radicand = ipow(abs(c), q) * r;
    const bigint t = integer_root(radicand, q);
    const bool exact = ipow(t, q) == radicand;
    if (sgn(c) >= 0) {
        return {t, exact};
    }
    return {exact ? bigint(-t) : bigint(-t - 1), exact};
}

unsigned long bits_for_tolerance(const rational &tolerance, const bigint &den)
{
    // Smallest k with 1 / (2^k den) <= tolerance.
    unsigned long k = 0;
    while (rational(1, bigint(den) << k) > tolerance) {
        ++k;
    }
    return k;
}

// Encloses {scale * x} for x in radical form, also reporting floor(scale * x).
rational_interval frac_of_radical(const radical_form &f, const rational &scale, const rational &tolerance,
                                  bigint *floor_out)
{
    const bigint u = scale.get_num();
    const bigint w = scale.get_den();
    auto attempt = [&](unsigned long k, bool &exact) {
        const bigint big_k = bigint(1) << k;
        const auto [root_part, root_exact] = floor_scaled_root(big_k * u * f.b, f.r, f.q);
        exact = root_exact || sgn(f.b) == 0 || sgn(u) == 0;
        const bigint t = big_k * u * f.a + root_part;
        const bigint d = big_k * w;
        if (floor_out != nullptr) {
            bigint fl;
            mpz_fdiv_q(fl.get_mpz_t(), t.get_mpz_t(), d.get_mpz_t());
            *floor_out = fl;
        }
        const bigint rem = mod_floor(t, d);
        rational lo(rem, d);
        lo.canonicalize();
        if (exact) {
            return rational_interval{lo, lo};
        }
        rational hi(rem + 1, d);
        hi.canonicalize();
        return rational_interval{lo, hi};
    };
    bool exact = false;
    auto coarse = attempt(0, exact);
    if (exact) {
        return coarse;
    }
    return attempt(bits_for_tolerance(tolerance, w), exact);
}

real_interval eval_variant(const sequence_variant &v, const real_interval &x, mpfr_prec_t prec);

void require_at_least_one_forever(const real_polynomial &poly)
{
    const auto &c = poly.coeffs;
    const std::size_t d = c.size() - 1;
    const auto lead = c[d].eval(128);
    if (!lead.certainly_positive()) {
        throw std::invalid_argument("polynomial leading coefficient must be positive");
    }
    // Every root of p(x) - 1 has modulus at most 1 + max |c_i| / c_d (Cauchy),
    // beyond which p(x) - 1 keeps the sign of c_d.
    double ratio = 0.0;
    const double lead_d = lead.midpoint();
    for (std::size_t i = 0; i < d; ++i) {
        double ci = std::abs(c[i].approx() - (i == 0 ? 1.0 : 0.0));
        ratio = std::max(ratio, ci / lead_d);
    }
    const double bound = std::ceil((1.0 + ratio) * (1.0 + 1e-9)) + 1.0;
    if (bound > 1e6) {
        throw std::invalid_argument("polynomial: cannot verify g(n) >= 1 (root bound too large)");
    }
    const sequence_variant probe{poly};
    for (std::uint64_t n = 1; n <= static_cast<std::uint64_t>(bound); ++n) {
        bool decided = false;
        for (mpfr_prec_t bits = 64; bits <= 4096 && !decided; bits *= 2) {
            const auto v = eval_variant(probe, real_interval::point(static_cast<long>(n), bits), bits);
            if (mpfr_cmp_si(v.lo.get(), 1) >= 0) {
                decided = true;
            } else if (mpfr_cmp_si(v.hi.get(), 1) < 0) {
                throw std::invalid_argument("polynomial takes a value below 1 at n = " + std::to_string(n));
            }
        }
        if (!decided) {
            throw std::invalid_argument("polynomial: cannot certify g(n) >= 1 at n = " + std::to_string(n));
        }
    }
}

} // namespace

sequence_spec::sequence_spec(sequence_variant v) : v_(std::move(v))
{
    if (auto *rp = std::get_if<rational_power>(&v_)) {
        if (rp->q == 0) {
            throw std::invalid_argument("pow: q must be at least 1");
        }
        rational e(bigint(rp->p), bigint(rp->q));
        e.canonicalize();
        *rp = make_rational_power(e);
    } else if (auto *rp = std::get_if<real_power>(&v_)) {
        if (rp->c.exact()) {
            v_ = make_rational_power(*rp->c.exact());
            return;
        }
        if (!rp->c.eval(128).certainly_positive()) {
            throw std::invalid_argument("rpow: exponent must be positive");
        }
    } else if (auto *lp = std::get_if<log_power>(&v_)) {
        const auto t = lp->t.eval(128);
        if (mpfr_cmp_si(t.lo.get(), 1) <= 0) {
            throw std::invalid_argument("logpow: exponent must be greater than 1");
        }
    } else if (auto *poly = std::get_if<real_polynomial>(&v_)) {
        while (!poly->coeffs.empty() && poly->coeffs.back().exact() && sgn(*poly->coeffs.back().exact()) == 0) {
            poly->coeffs.pop_back();
        }
        if (poly->coeffs.empty()) {
            throw std::invalid_argument("poly: the zero polynomial is not >= 1");
        }
        require_at_least_one_forever(*poly);
    } else if (auto *as = std::get_if<affine_sqrt>(&v_)) {
        if (as->a + as->b < 1) {
            throw std::invalid_argument("affsqrt: a + b must be at least 1");
        }
    }
}

sequence_spec sequence_spec::parse(std::string_view text)
{
    const auto colon = text.find(':');
    const std::string head(text.substr(0, colon));
    const std::string_view args = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    const std::string context = "sequence '" + std::string(text) + "'";
    if (head == "pow") {
        return sequence_spec{make_rational_power(parse_rational(std::string(args)))};
    }
    if (head == "rpow") {
        return sequence_spec{real_power{real_constant::parse(args)}};
    }
    if (head == "nlogn" && args.empty()) {
        return sequence_spec{n_log_n{}};
    }
    if (head == "nsqoverlog" && args.empty()) {
        return sequence_spec{n_sq_over_log{}};
    }
    if (head == "logpow") {
        return sequence_spec{log_power{real_constant::parse(args)}};
    }
    if (head == "poly") {
        real_polynomial poly;
        for (const auto &c : split(args, ',')) {
            poly.coeffs.push_back(real_constant::parse(c));
        }
        return sequence_spec{poly};
    }
    if (head == "affsqrt") {
        const auto parts = split(args, ',');
        if (parts.size() != 2) {
            throw parse_error(context + ": expected affsqrt:a,b");
        }
        return sequence_spec{affine_sqrt{parse_ulong(parts[0], context), parse_ulong(parts[1], context)}};
    }
    throw parse_error("unknown " + context);
}

std::string sequence_spec::text() const
{
    return std::visit(overloaded{
                          [](const rational_power &rp) {
                              return rp.q == 1 ? "pow:" + std::to_string(rp.p)
                                               : "pow:" + std::to_string(rp.p) + "/" + std::to_string(rp.q);
                          },
                          [](const real_power &rp) { return "rpow:" + rp.c.text(); },
                          [](const n_log_n &) { return std::string("nlogn"); },
                          [](const n_sq_over_log &) { return std::string("nsqoverlog"); },
                          [](const log_power &lp) { return "logpow:" + lp.t.text(); },
                          [](const real_polynomial &poly) {
                              std::string s = "poly:";
                              for (std::size_t i = 0; i < poly.coeffs.size(); ++i) {
                                  s += (i ? "," : "") + poly.coeffs[i].text();
                              }
                              return s;
                          },
                          [](const affine_sqrt &as) {
                              return "affsqrt:" + std::to_string(as.a) + "," + std::to_string(as.b);
                          },
                      },
                      v_);
}

bool sequence_spec::has_exact_path() const noexcept
{
    return std::holds_alternative<rational_power>(v_) || std::holds_alternative<affine_sqrt>(v_);
}

bool sequence_spec::monotone() const noexcept
{
    if (const auto *poly = std::get_if<real_polynomial>(&v_)) {
        return std::all_of(poly->coeffs.begin(), poly->coeffs.end(),
                           [](const real_constant &c) { return !c.eval(128).certainly_negative(); });
    }
    return true;
}

namespace
{

real_interval eval_variant(const sequence_variant &v, const real_interval &x, mpfr_prec_t prec)
{
    const auto one = real_interval::point(1L, prec);
    const bool at_one = x.is_point() && mpfr_cmp_si(x.lo.get(), 1) == 0;
    return std::visit(overloaded{
                          [&](const rational_power &rp) {
                              if (rp.q == 1) {
                                  return pow(x, static_cast<long>(rp.p));
                              }
                              return pow(x, real_interval::point(rational(bigint(rp.p), bigint(rp.q)), prec));
                          },
                          [&](const real_power &rp) { return pow(x, rp.c.eval(prec)); },
                          [&](const n_log_n &) { return max_with(x * log(x), 1); },
                          [&](const n_sq_over_log &) {
                              if (at_one) {
                                  return one;
                              }
                              return max_with(pow(x, 2L) / log(x), 1);
                          },
                          [&](const log_power &lp) {
                              if (at_one) {
                                  return one;
                              }
                              return max_with(pow(log(x), lp.t.eval(prec)), 1);
                          },
                          [&](const real_polynomial &poly) {
                              auto acc = poly.coeffs.back().eval(prec);
                              for (std::size_t i = poly.coeffs.size() - 1; i-- > 0;) {
                                  acc = acc * x + poly.coeffs[i].eval(prec);
                              }
                              return acc;
                          },
                          [&](const affine_sqrt &as) {
                              return real_interval::point(static_cast<long>(as.a), prec) * x
                                     + real_interval::point(static_cast<long>(as.b), prec) * sqrt(x);
                          },
                      },
                      v);
}

} // namespace

real_interval sequence_spec::eval(const real_interval &x, mpfr_prec_t prec) const
{
    return eval_variant(v_, x, prec);
}

floor_result floor_eval(const sequence_spec &spec, std::uint64_t n, const precision_policy &policy)
{
    if (n < 1) {
        throw std::invalid_argument("floor_eval: n must be at least 1");
    }
    floor_result out;
    if (spec.has_exact_path()) {
        const auto form = radical_of(spec, n);
        bigint fl;
        out.frac = frac_of_radical(form, rational(1), policy.tolerance, &fl);
        out.value = fl;
        out.certified = true;
        out.g = rational_interval{rational(fl) + out.frac.lo, rational(fl) + out.frac.hi};
        return out;
    }
    for (mpfr_prec_t bits = policy.start_bits; bits <= policy.cap_bits; bits *= 2) {
        const auto x = real_interval::point(bigint(static_cast<unsigned long>(n)), bits);
        const auto g = spec.eval(x, bits);
        out.g = rational_interval{g.lo_rational(), g.hi_rational()};
        out.bits_used = bits;
        out.value = g.floor_lo();
        if (g.floor_is_determined()) {
            const rational base(out.value);
            rational_interval frac{out.g.lo - base, out.g.hi - base};
            if (frac.hi - frac.lo <= policy.tolerance) {
                out.frac = frac;
                out.certified = true;
                return out;
            }
        }
    }
    out.certified = false;
    out.frac = rational_interval{rational(0), rational(1)};
    return out;
}

bigint floor_value(const sequence_spec &spec, std::uint64_t n, const precision_policy &policy)
{
    auto r = floor_eval(spec, n, policy);
    if (!r.certified) {
        throw precision_exhausted("[g(n)] for " + spec.text() + " at n = " + std::to_string(n)
                                  + " is not separated from an integer within " + std::to_string(policy.cap_bits)
                                  + " bits");
    }
    return r.value;
}

std::vector<std::int64_t> floor_values(const sequence_spec &spec, std::uint64_t count, const precision_policy &policy)
{
    std::vector<std::int64_t> out;
    out.reserve(count);
    const auto &v = spec.variant();
    if (const auto *rp = std::get_if<rational_power>(&v); rp != nullptr && rp->q <= 2 && rp->p <= 4) {
        // n^p < 2^128 for n < 2^32 and p <= 4, so isqrt on u128 is exact.
        for (std::uint64_t n = 1; n <= count; ++n) {
            if (n >= (std::uint64_t{1} << 32)) {
                out.push_back(to_int64(floor_value(spec, n, policy)));
                continue;
            }
            u128 power = 1;
            for (unsigned long i = 0; i < rp->p; ++i) {
                power *= n;
            }
            const u128 root = rp->q == 1 ? power : static_cast<u128>(isqrt(power));
            if (root > static_cast<u128>(std::numeric_limits<std::int64_t>::max())) {
                throw std::overflow_error("[g(n)] exceeds 64 bits at n = " + std::to_string(n));
            }
            out.push_back(static_cast<std::int64_t>(root));
        }
        return out;
    }
    if (const auto *as = std::get_if<affine_sqrt>(&v); as != nullptr && count < (std::uint64_t{1} << 40)
                                                       && as->a < (1UL << 20) && as->b < (1UL << 20)) {
        for (std::uint64_t n = 1; n <= count; ++n) {
            const u128 b = as->b;
            out.push_back(static_cast<std::int64_t>(as->a * n + isqrt(b * b * n)));
        }
        return out;
    }
    for (std::uint64_t n = 1; n <= count; ++n) {
        out.push_back(to_int64(floor_value(spec, n, policy)));
    }
    return out;
}

rational_interval frac_eval(const sequence_spec &spec, std::uint64_t n, const rational &scale,
                            const precision_policy &policy)
{
    if (n < 1) {
        throw std::invalid_argument("frac_eval: n must be at least 1");
    }
    if (spec.has_exact_path()) {
        return frac_of_radical(radical_of(spec, n), scale, policy.tolerance, nullptr);
    }
    for (mpfr_prec_t bits = policy.start_bits; bits <= policy.cap_bits; bits *= 2) {
        const auto x = real_interval::point(bigint(static_cast<unsigned long>(n)), bits);
        const auto v = real_interval::point(scale, bits) * spec.eval(x, bits);
        if (v.floor_is_determined()) {
            const rational base(v.floor_lo());
            rational_interval frac{v.lo_rational() - base, v.hi_rational() - base};
            if (frac.hi - frac.lo <= policy.tolerance) {
                return frac;
            }
        }
    }
    throw precision_exhausted("{" + scale.get_str() + " g(n)} for " + spec.text() + " at n = " + std::to_string(n)
                              + " is not separated from an integer within " + std::to_string(policy.cap_bits)
                              + " bits");
}

} // namespace ergodiff

#include <ergodiff/folner.hpp>

#include <ergodiff/bitset.hpp>
#include <ergodiff/errors.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ergodiff
{

struct folner_family::cache {
    std::mutex m;
    std::map<std::uint64_t, std::shared_ptr<const std::vector<semigroup_element>>> sets;
};

namespace
{

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bigint eval_at(const int_expr &e, std::uint64_t n)
{
    return e.eval(bigint(static_cast<unsigned long>(n)));
}

std::map<std::string, std::string> parse_fields(const std::string &body, char sep)
{
    std::map<std::string, std::string> out;
    if (body.empty()) {
        return out;
    }
    std::stringstream ss(body);
    std::string kv;
    while (std::getline(ss, kv, sep)) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw parse_error("family parameter '" + kv + "' is not key=value");
        }
        out[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return out;
}

void require_cap(const bigint &work, std::uint64_t cap, const std::string &what)
{
    if (work > bigint(static_cast<unsigned long>(cap))) {
        throw enumeration_too_large(what + " needs " + work.get_str() + " operations, cap is "
                                    + std::to_string(cap));
    }
}

std::int64_t small(const bigint &x, const char *what)
{
    if (!fits_int64(x)) {
        throw enumeration_too_large(std::string(what) + " does not fit a machine word");
    }
    return to_int64(x);
}

// Size of the union of closed integer intervals.
bigint union_size(std::vector<std::pair<bigint, bigint>> ivs)
{
    std::erase_if(ivs, [](const auto &iv) { return iv.second < iv.first; });
    std::sort(ivs.begin(), ivs.end());
    bigint total = 0;
    bool open = false;
    bigint lo;
    bigint hi;
    for (const auto &[a, b] : ivs) {
        if (open && a <= hi + 1) {
            hi = std::max(hi, b);
            continue;
        }
        if (open) {
            total += hi - lo + 1;
        }
        lo = a;
        hi = b;
        open = true;
    }
    if (open) {
        total += hi - lo + 1;
    }
    return total;
}

std::vector<std::int64_t> exponents_of(const semigroup_element &g)
{
    if (const auto *x = std::get_if<nat_mul>(&g.variant())) {
        return x->exponents;
    }
    if (const auto *x = std::get_if<q_pos>(&g.variant())) {
        return x->exponents;
    }
    throw tag_mismatch("multiplicative box expects natmul or qpos, got " + to_string(g.tag()));
}

void require_family_tag(const folner_family &family, const semigroup_element &g)
{
    const auto t = family.tag();
    if (g.tag() == t || (t == element_tag::nat_mul && g.tag() == element_tag::q_pos)) {
        return;
    }
    throw tag_mismatch("family " + family.text() + " holds " + to_string(t) + " elements, got " + to_string(g.tag()));
}

std::vector<std::uint64_t> quotient_indices(const folner_family &family, std::uint64_t n)
{
    if (family.nested_through(n)) {
        return {n - 1};
    }
    std::vector<std::uint64_t> ks;
    for (std::uint64_t k = 1; k < n; ++k) {
        ks.push_back(k);
    }
    return ks;
}

bool is_default_heisbox(const heisbox_family &h)
{
    return h.p.text() == "n" && h.q.text() == "n^2";
}

// Union over ks of F_k^{-1}(F_n g) by explicit products of elements.
bigint generic_quotient_size(const folner_family &family, std::uint64_t n, const std::vector<std::uint64_t> &ks,
                             const ratio_options &options)
{
    bigint work = 0;
    for (auto k : ks) {
        work += family.cardinality(k) * family.cardinality(n);
    }
    require_cap(work, options.cap, "quotient enumeration for " + family.text());

    const bool to_group = options.mode == quotient_mode::group && family.tag() == element_tag::nat_mul;
    auto lift = [&](const std::vector<semigroup_element> &xs) {
        if (!to_group) {
            return xs;
        }
        std::vector<semigroup_element> out;
        out.reserve(xs.size());
        for (const auto &x : xs) {
            out.push_back(to_group_of_quotients(x));
        }
        return out;
    };

    auto fn = lift(*family.elements(n, options.cap));
    if (options.mode == quotient_mode::semigroup && options.g) {
        for (auto &b : fn) {
            b = mul(b, *options.g);
        }
    }
    std::vector<semigroup_element> all;
    for (auto k : ks) {
        const auto fk = lift(*family.elements(k, options.cap));
        auto part = left_quotient_set(fk, fn);
        all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    if (options.mode == quotient_mode::semigroup && family.tag() == element_tag::int_add) {
        // (N, +) with N = {1, 2, ...}.
        std::erase_if(all, [](const semigroup_element &h) { return std::get<int_add>(h.variant()).k < 1; });
    }
    return bigint(static_cast<unsigned long>(all.size()));
}

// Quotients in Q_{>0} for multiplicative boxes, marked row by row: F_k has
// no p_n factor, so the p_n exponent of a quotient ranges over all of
// [0, bound_n(n)] and only the first n-1 coordinates need a bitmap.
bigint multbox_quotient_size(const folner_family &family, std::uint64_t n, const std::vector<std::uint64_t> &ks,
                             std::uint64_t cap)
{
    const std::size_t d = n - 1;
    std::vector<std::int64_t> hi(d);
    std::vector<std::int64_t> lo(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
        hi[i] = small(family.box_bound(i + 1, n), "box bound");
        for (auto k : ks) {
            if (i + 1 <= k) {
                lo[i] = std::min(lo[i], -small(family.box_bound(i + 1, k), "box bound"));
            }
        }
    }
    bigint rows = 1;
    bigint bits = 1;
    for (std::size_t i = 0; i < d; ++i) {
        rows *= hi[i] + 1;
        bits *= hi[i] - lo[i] + 1;
    }
    bigint work = 0;
    for (auto k : ks) {
        work += family.cardinality(k) * rows;
    }
    require_cap(work, cap, "quotient enumeration for " + family.text());
    require_cap(bits, 8 * cap, "quotient bitmap for " + family.text());

    std::vector<std::uint64_t> stride(d, 1);
    for (std::size_t i = d; i-- > 1;) {
        stride[i - 1] = stride[i] * static_cast<std::uint64_t>(hi[i] - lo[i] + 1);
    }
    std::uint64_t base = 0;
    for (std::size_t i = 0; i < d; ++i) {
        base += static_cast<std::uint64_t>(-lo[i]) * stride[i];
    }

    // Offsets of every point of a box {0 <= c_i <= bound_i} in the bitmap.
    auto box_offsets = [&](const std::vector<std::int64_t> &bounds) {
        std::vector<std::uint64_t> out{0};
        for (std::size_t i = 0; i < bounds.size(); ++i) {
            std::vector<std::uint64_t> next;
            next.reserve(out.size() * static_cast<std::size_t>(bounds[i] + 1));
            for (auto o : out) {
                for (std::int64_t c = 0; c <= bounds[i]; ++c) {
                    next.push_back(o + static_cast<std::uint64_t>(c) * stride[i]);
                }
            }
            out.swap(next);
        }
        return out;
    };

    const auto row_offsets = box_offsets(hi);
    bitvec marked(static_cast<std::size_t>(to_int64(bits)));
    for (auto k : ks) {
        std::vector<std::int64_t> kb(k);
        for (std::size_t i = 0; i < k; ++i) {
            kb[i] = small(family.box_bound(i + 1, k), "box bound");
        }
        for (auto a : box_offsets(kb)) {
            const auto shift = base - a;
            for (auto b : row_offsets) {
                marked.set(b + shift);
            }
        }
    }
    return bigint(static_cast<unsigned long>(marked.count())) * (family.box_bound(n, n) + 1);
}

struct heis_enum_result {
    bigint count;
    std::uint64_t pairs = 0;
};

// (x,y,z)^{-1}(a,b,c) = (a-x, b-y, c - z + x(y-b)); the c coordinate sweeps a
// contiguous run, so each (element of F_k, (a,b)) pair marks one range.
heis_enum_result heis_quotient_size(const folner_family &family, std::uint64_t n,
                                    const std::vector<std::uint64_t> &ks, std::uint64_t cap)
{
    const auto [pn_big, qn_big] = family.heis_bounds(n);
    const auto pn = small(pn_big, "heisenberg bound");
    const auto qn = small(qn_big, "heisenberg bound");
    std::int64_t pk = 0;
    std::int64_t qk = 0;
    bigint work = 0;
    for (auto k : ks) {
        const auto [p, q] = family.heis_bounds(k);
        pk = std::max(pk, small(p, "heisenberg bound"));
        qk = std::max(qk, small(q, "heisenberg bound"));
        work += family.cardinality(k) * family.cardinality(n);
    }
    require_cap(work, cap, "quotient enumeration for " + family.text());

    const std::int64_t r12 = pk + pn;
    const std::int64_t r3 = qn + qk + pk * (pk + pn);
    const bigint w12 = 2 * r12 + 1;
    const bigint w3 = 2 * r3 + 1;
    const bigint bits = w12 * w12 * w3;
    require_cap(bits, 8 * cap, "quotient bitmap for " + family.text());
    const auto W12 = static_cast<std::uint64_t>(2 * r12 + 1);
    const auto W3 = static_cast<std::uint64_t>(2 * r3 + 1);
    bitvec marked(static_cast<std::size_t>(to_int64(bits)));

    for (auto k : ks) {
        const auto [pb, qb] = family.heis_bounds(k);
        const auto p = to_int64(pb);
        const auto q = to_int64(qb);
        for (std::int64_t x = -p; x <= p; ++x) {
            for (std::int64_t y = -p; y <= p; ++y) {
                for (std::int64_t z = -q; z <= q; ++z) {
                    for (std::int64_t a = -pn; a <= pn; ++a) {
                        for (std::int64_t b = -pn; b <= pn; ++b) {
                            const std::int64_t c_lo = -qn - z + x * (y - b);
                            const auto row = (static_cast<std::uint64_t>(a - x + r12) * W12
                                              + static_cast<std::uint64_t>(b - y + r12))
                                             * W3;
                            const auto start = row + static_cast<std::uint64_t>(c_lo + r3);
                            marked.set_range(start, start + static_cast<std::uint64_t>(2 * qn + 1));
                        }
                    }
                }
            }
        }
    }
    return {bigint(static_cast<unsigned long>(marked.count())), static_cast<std::uint64_t>(to_int64(work))};
}

rational multbox_ratio_bound(std::uint64_t n)
{
    rational r = 1;
    for (std::uint64_t i = 1; i < n; ++i) {
        const bigint s = bigint(static_cast<unsigned long>(i + 1)) * (i + 1);
        rational f(s + 1, s);
        f.canonicalize();
        r *= f;
    }
    r.canonicalize();
    return r;
}

} // namespace

folner_family::folner_family(family_variant v) : v_(std::move(v)), cache_(std::make_shared<cache>())
{
    if (const auto *m = std::get_if<multbox_family>(&v_)) {
        if (m->k == multbox_family::kind::f && !m->f) {
            throw std::invalid_argument("multbox:f needs an expression");
        }
        if (m->k == multbox_family::kind::eps && sgn(m->eps) < 0) {
            throw std::invalid_argument("multbox:eps must be nonnegative");
        }
    }
    if (const auto *c = std::get_if<chain_family>(&v_)) {
        if (c->k == chain_family::kind::polyheis) {
            // Validates q through the element constructor.
            semigroup_element{poly_heis{c->q, {}, {}, {}}};
        }
    }
}

folner_family folner_family::parse(std::string_view text)
{
    const std::string s(text);
    const auto colon = s.find(':');
    const std::string head = s.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "interval") {
        interval_family f;
        for (const auto &[k, v] : parse_fields(body, ',')) {
            if (k == "a") {
                f.a = int_expr::parse(v);
            } else if (k == "b") {
                f.b = int_expr::parse(v);
            } else {
                throw parse_error("interval family: unknown key '" + k + "'");
            }
        }
        return folner_family{f};
    }
    if (head == "multbox") {
        multbox_family f;
        if (body.empty() || body == "paper") {
            return folner_family{f};
        }
        const auto fields = parse_fields(body, ',');
        if (fields.size() != 1) {
            throw parse_error("multbox family takes exactly one of paper, f=, eps=");
        }
        const auto &[k, v] = *fields.begin();
        if (k == "f") {
            f.k = multbox_family::kind::f;
            f.f = int_expr::parse(v);
        } else if (k == "eps") {
            f.k = multbox_family::kind::eps;
            f.eps = parse_rational(v);
        } else {
            throw parse_error("multbox family: unknown key '" + k + "'");
        }
        return folner_family{f};
    }
    if (head == "heisbox") {
        heisbox_family f;
        for (const auto &[k, v] : parse_fields(body, ',')) {
            if (k == "p") {
                f.p = int_expr::parse(v);
            } else if (k == "q") {
                f.q = int_expr::parse(v);
            } else {
                throw parse_error("heisbox family: unknown key '" + k + "'");
            }
        }
        return folner_family{f};
    }
    if (head == "chain") {
        chain_family f;
        if (body == "sym") {
            return folner_family{f};
        }
        if (body.rfind("polyheis", 0) == 0) {
            f.k = chain_family::kind::polyheis;
            const auto rest = body.substr(std::string("polyheis").size());
            if (!rest.empty()) {
                if (rest[0] != ':') {
                    throw parse_error("chain:polyheis expects ':q=...'");
                }
                const auto fields = parse_fields(rest.substr(1), ',');
                for (const auto &[k, v] : fields) {
                    if (k != "q") {
                        throw parse_error("chain:polyheis: unknown key '" + k + "'");
                    }
                    const auto q = parse_rational(v);
                    if (q.get_den() != 1 || q < 2 || q > 65521) {
                        throw parse_error("chain:polyheis: bad q '" + v + "'");
                    }
                    f.q = static_cast<std::uint32_t>(q.get_num().get_ui());
                }
            }
            try {
                return folner_family{f};
            } catch (const std::invalid_argument &e) {
                throw parse_error(e.what());
            }
        }
        throw parse_error("unknown chain family '" + body + "'");
    }
    throw parse_error("unknown family '" + s + "'");
}

std::string folner_family::text() const
{
    return std::visit(overloaded{
                          [](const interval_family &f) {
                              return "interval:a=" + f.a.text() + ",b=" + f.b.text();
                          },
                          [](const multbox_family &f) -> std::string {
                              switch (f.k) {
                              case multbox_family::kind::paper:
                                  return "multbox:paper";
                              case multbox_family::kind::f:
                                  return "multbox:f=" + f.f->text();
                              case multbox_family::kind::eps:
                                  return "multbox:eps=" + to_string(f.eps);
                              }
                              return "";
                          },
                          [](const heisbox_family &f) { return "heisbox:p=" + f.p.text() + ",q=" + f.q.text(); },
                          [](const chain_family &f) {
                              return f.k == chain_family::kind::sym ? std::string("chain:sym")
                                                                     : "chain:polyheis:q=" + std::to_string(f.q);
                          },
                      },
                      v_);
}

element_tag folner_family::tag() const
{
    return std::visit(overloaded{
                          [](const interval_family &) { return element_tag::int_add; },
                          [](const multbox_family &) { return element_tag::nat_mul; },
                          [](const heisbox_family &) { return element_tag::heisenberg; },
                          [](const chain_family &f) {
                              return f.k == chain_family::kind::sym ? element_tag::fin_perm : element_tag::poly_heis;
                          },
                      },
                      v_);
}

bigint folner_family::box_bound(std::uint64_t i, std::uint64_t n) const
{
    const auto *m = std::get_if<multbox_family>(&v_);
    if (m == nullptr) {
        throw std::logic_error("box_bound on a non-multiplicative family");
    }
    if (i == 0 || n == 0) {
        throw std::invalid_argument("box_bound: indices start at 1");
    }
    if (i > n) {
        return 0;
    }
    const bigint base(static_cast<unsigned long>(i + 1));
    bigint v;
    switch (m->k) {
    case multbox_family::kind::paper:
        v = ipow(base, 2 * n);
        break;
    case multbox_family::kind::f:
        v = eval_at(*m->f, n);
        break;
    case multbox_family::kind::eps: {
        // floor((i+1)^{(1+eps)n}) = floor(((i+1)^{(num+den)n})^{1/den}).
        const rational e = m->eps;
        const bigint num = e.get_num();
        const bigint den = e.get_den();
        const bigint expo = (num + den) * static_cast<unsigned long>(n);
        v = integer_root(ipow(base, expo.get_ui()), den.get_ui());
        break;
    }
    }
    if (v < 0) {
        throw std::invalid_argument("box bound is negative at n=" + std::to_string(n));
    }
    return v;
}

std::pair<bigint, bigint> folner_family::interval_bounds(std::uint64_t n) const
{
    const auto &f = std::get<interval_family>(v_);
    auto a = eval_at(f.a, n);
    auto b = eval_at(f.b, n);
    if (b < a) {
        throw std::invalid_argument("interval family empty at n=" + std::to_string(n));
    }
    return {std::move(a), std::move(b)};
}

std::pair<bigint, bigint> folner_family::heis_bounds(std::uint64_t n) const
{
    const auto &f = std::get<heisbox_family>(v_);
    auto p = eval_at(f.p, n);
    auto q = eval_at(f.q, n);
    if (p < 0 || q < 0) {
        throw std::invalid_argument("heisbox bounds negative at n=" + std::to_string(n));
    }
    return {std::move(p), std::move(q)};
}

bigint folner_family::cardinality(std::uint64_t n) const
{
    if (n == 0) {
        throw std::invalid_argument("family indices start at 1");
    }
    return std::visit(overloaded{
                          [&](const interval_family &) {
                              const auto [a, b] = interval_bounds(n);
                              return bigint(b - a + 1);
                          },
                          [&](const multbox_family &) {
                              bigint c = 1;
                              for (std::uint64_t i = 1; i <= n; ++i) {
                                  c *= box_bound(i, n) + 1;
                              }
                              return c;
                          },
                          [&](const heisbox_family &) {
                              const auto [p, q] = heis_bounds(n);
                              return bigint((2 * p + 1) * (2 * p + 1) * (2 * q + 1));
                          },
                          [&](const chain_family &f) {
                              if (f.k == chain_family::kind::sym) {
                                  bigint c = 1;
                                  for (std::uint64_t k = 2; k <= n; ++k) {
                                      c *= static_cast<unsigned long>(k);
                                  }
                                  return c;
                              }
                              return ipow(bigint(f.q), 4 * n + 3);
                          },
                      },
                      v_);
}

bool folner_family::nested_through(std::uint64_t n) const
{
    for (std::uint64_t k = 1; k < n; ++k) {
        const bool ok = std::visit(overloaded{
                                       [&](const interval_family &) {
                                           const auto [a0, b0] = interval_bounds(k);
                                           const auto [a1, b1] = interval_bounds(k + 1);
                                           return a1 <= a0 && b0 <= b1;
                                       },
                                       [&](const multbox_family &) {
                                           for (std::uint64_t i = 1; i <= k; ++i) {
                                               if (box_bound(i, k) > box_bound(i, k + 1)) {
                                                   return false;
                                               }
                                           }
                                           return true;
                                       },
                                       [&](const heisbox_family &) {
                                           const auto [p0, q0] = heis_bounds(k);
                                           const auto [p1, q1] = heis_bounds(k + 1);
                                           return p0 <= p1 && q0 <= q1;
                                       },
                                       [](const chain_family &) { return true; },
                                   },
                                   v_);
        if (!ok) {
            return false;
        }
    }
    return true;
}

std::shared_ptr<const std::vector<semigroup_element>> folner_family::elements(std::uint64_t n,
                                                                              std::uint64_t cap) const
{
    {
        std::lock_guard lock(cache_->m);
        if (const auto it = cache_->sets.find(n); it != cache_->sets.end()) {
            return it->second;
        }
    }
    require_cap(cardinality(n), cap, "enumerating F_" + std::to_string(n) + " of " + text());

    std::vector<semigroup_element> out;
    std::visit(overloaded{
                   [&](const interval_family &) {
                       const auto [a, b] = interval_bounds(n);
                       for (bigint k = a; k <= b; ++k) {
                           out.emplace_back(int_add{k});
                       }
                   },
                   [&](const multbox_family &) {
                       std::vector<std::int64_t> bounds(n);
                       for (std::uint64_t i = 0; i < n; ++i) {
                           bounds[i] = small(box_bound(i + 1, n), "box bound");
                       }
                       std::vector<std::int64_t> c(n, 0);
                       for (;;) {
                           out.emplace_back(nat_mul{c});
                           std::size_t i = 0;
                           while (i < n && c[i] == bounds[i]) {
                               c[i++] = 0;
                           }
                           if (i == n) {
                               break;
                           }
                           ++c[i];
                       }
                   },
                   [&](const heisbox_family &) {
                       const auto [pb, qb] = heis_bounds(n);
                       const auto p = to_int64(pb);
                       const auto q = to_int64(qb);
                       for (std::int64_t a = -p; a <= p; ++a) {
                           for (std::int64_t b = -p; b <= p; ++b) {
                               for (std::int64_t c = -q; c <= q; ++c) {
                                   out.emplace_back(heisenberg{bigint(static_cast<long>(a)),
                                                               bigint(static_cast<long>(b)),
                                                               bigint(static_cast<long>(c))});
                               }
                           }
                       }
                   },
                   [&](const chain_family &f) {
                       if (f.k == chain_family::kind::sym) {
                           std::vector<std::uint64_t> perm(n);
                           for (std::uint64_t i = 0; i < n; ++i) {
                               perm[i] = i + 1;
                           }
                           do {
                               fin_perm p;
                               for (std::uint64_t i = 0; i < n; ++i) {
                                   if (perm[i] != i + 1) {
                                       p.moved.emplace(i + 1, perm[i]);
                                   }
                               }
                               out.emplace_back(std::move(p));
                           } while (std::next_permutation(perm.begin(), perm.end()));
                           return;
                       }
                       // All polynomials of degree <= d over F_q.
                       auto polys = [&](std::uint64_t d) {
                           std::vector<fq_poly> ps;
                           std::vector<std::uint32_t> c(d + 1, 0);
                           for (;;) {
                               fq_poly p{c};
                               while (!p.coeffs.empty() && p.coeffs.back() == 0) {
                                   p.coeffs.pop_back();
                               }
                               ps.push_back(std::move(p));
                               std::size_t i = 0;
                               while (i <= d && c[i] == f.q - 1) {
                                   c[i++] = 0;
                               }
                               if (i > d) {
                                   break;
                               }
                               ++c[i];
                           }
                           return ps;
                       };
                       const auto fs = polys(n);
                       const auto hs = polys(2 * n);
                       for (const auto &x : fs) {
                           for (const auto &y : fs) {
                               for (const auto &z : hs) {
                                   out.emplace_back(poly_heis{f.q, x, y, z});
                               }
                           }
                       }
                   },
               },
               v_);
    std::sort(out.begin(), out.end());
    auto ptr = std::make_shared<const std::vector<semigroup_element>>(std::move(out));
    std::lock_guard lock(cache_->m);
    return cache_->sets.emplace(n, std::move(ptr)).first->second;
}

rational folner_defect(const folner_family &family, const semigroup_element &g, std::uint64_t n, std::uint64_t cap)
{
    require_family_tag(family, g);
    rational r = std::visit(
        overloaded{
            [&](const interval_family &) {
                const auto size = family.cardinality(n);
                const bigint shift = abs(std::get<int_add>(g.variant()).k);
                const bigint overlap = shift >= size ? bigint(0) : bigint(size - shift);
                return rational(overlap, size);
            },
            [&](const multbox_family &) {
                const auto e = exponents_of(g);
                if (e.size() > n) {
                    return rational(0);
                }
                bigint overlap = 1;
                for (std::uint64_t i = 1; i <= n; ++i) {
                    const bigint width = family.box_bound(i, n) + 1;
                    const bigint shift = i <= e.size() ? std::abs(e[i - 1]) : 0;
                    overlap *= shift >= width ? bigint(0) : bigint(width - shift);
                }
                return rational(overlap, family.cardinality(n));
            },
            [&](const heisbox_family &) {
                // g f = (x+a, y+b, z + x b + c): count (a, b, c) in the box with g f in the box.
                const auto &h = std::get<heisenberg>(g.variant());
                const auto [p, q] = family.heis_bounds(n);
                auto fit = [](const bigint &w, const bigint &shift) {
                    const bigint s = abs(shift);
                    return s >= w ? bigint(0) : bigint(w - s);
                };
                const bigint count_a = fit(2 * p + 1, h.a);
                bigint total_bc = 0;
                for (bigint b = -p; b <= p; ++b) {
                    if (abs(h.b + b) > p) {
                        continue;
                    }
                    total_bc += fit(2 * q + 1, h.c + h.a * b);
                }
                return rational(count_a * total_bc, family.cardinality(n));
            },
            [&](const chain_family &) -> rational {
                // F_n is a subgroup: g F_n is F_n or disjoint from it.
                bool inside = false;
                if (const auto *p = std::get_if<fin_perm>(&g.variant())) {
                    inside = p->moved.empty() || p->moved.rbegin()->first <= n;
                } else {
                    const auto &x = std::get<poly_heis>(g.variant());
                    const auto &c = std::get<chain_family>(family.variant());
                    if (x.q != c.q) {
                        throw tag_mismatch("polyheis element over a different field");
                    }
                    const auto dn = static_cast<long>(n);
                    inside = x.f.degree() <= dn && x.g.degree() <= dn && x.h.degree() <= 2 * dn;
                }
                return inside ? rational(1) : rational(0);
            },
        },
        family.variant());
    (void)cap;
    r.canonicalize();
    return r;
}

rational folner_defect_enumerated(const folner_family &family, const semigroup_element &g, std::uint64_t n,
                                  std::uint64_t cap)
{
    require_family_tag(family, g);
    auto fn = *family.elements(n, cap);
    const bool lift = g.tag() == element_tag::q_pos;
    if (lift) {
        for (auto &x : fn) {
            x = to_group_of_quotients(x);
        }
        std::sort(fn.begin(), fn.end());
    }
    std::uint64_t hits = 0;
    for (const auto &f : fn) {
        if (std::binary_search(fn.begin(), fn.end(), mul(g, f))) {
            ++hits;
        }
    }
    rational r(bigint(static_cast<unsigned long>(hits)), bigint(static_cast<unsigned long>(fn.size())));
    r.canonicalize();
    return r;
}

std::string to_string(quotient_mode m)
{
    return m == quotient_mode::group ? "group" : "semigroup";
}

std::string to_string(ratio_method m)
{
    switch (m) {
    case ratio_method::automatic:
        return "automatic";
    case ratio_method::closed_form:
        return "closed-form";
    case ratio_method::enumeration:
        return "enumeration";
    }
    return "unknown";
}

ratio_result tempered_ratio(const folner_family &family, std::uint64_t n, const ratio_options &options)
{
    if (n < 2) {
        throw std::invalid_argument("tempered_ratio needs n >= 2");
    }
    if (options.g) {
        require_family_tag(family, *options.g);
    }
    ratio_result r;
    r.n = n;
    r.family_size = family.cardinality(n);
    r.nested = family.nested_through(n);
    const auto ks = quotient_indices(family, n);
    const bool semigroup = options.mode == quotient_mode::semigroup;

    // Closed form, or nullopt if this family/mode has none.
    auto closed = [&]() -> std::optional<bigint> {
        return std::visit(
            overloaded{
                [&](const interval_family &) -> std::optional<bigint> {
                    const auto [an, bn] = family.interval_bounds(n);
                    bigint shift = 0;
                    if (semigroup && options.g) {
                        shift = std::get<int_add>(options.g->variant()).k;
                    }
                    std::vector<std::pair<bigint, bigint>> ivs;
                    for (auto k : ks) {
                        const auto [ak, bk] = family.interval_bounds(k);
                        bigint lo = an + shift - bk;
                        if (semigroup && lo < 1) {
                            lo = 1;
                        }
                        ivs.emplace_back(lo, bn + shift - ak);
                    }
                    return union_size(std::move(ivs));
                },
                [&](const multbox_family &) -> std::optional<bigint> {
                    if (!r.nested) {
                        return std::nullopt;
                    }
                    bigint size = 1;
                    if (!semigroup) {
                        for (std::uint64_t i = 1; i < n; ++i) {
                            size *= family.box_bound(i, n) + family.box_bound(i, n - 1) + 1;
                        }
                        return size * (family.box_bound(n, n) + 1);
                    }
                    const auto e = options.g ? exponents_of(*options.g) : std::vector<std::int64_t>{};
                    if (options.g && options.g->tag() == element_tag::q_pos) {
                        for (auto v : e) {
                            if (v < 0) {
                                throw tag_mismatch("semigroup mode needs a natural translate");
                            }
                        }
                    }
                    for (std::uint64_t i = 1; i <= n; ++i) {
                        const bigint gi = i <= e.size() ? e[i - 1] : 0;
                        const bigint lo = std::max(bigint(0), bigint(gi - family.box_bound(i, n - 1)));
                        size *= family.box_bound(i, n) + gi - lo + 1;
                    }
                    return size;
                },
                [&](const heisbox_family &) -> std::optional<bigint> { return std::nullopt; },
                [&](const chain_family &) -> std::optional<bigint> {
                    // Subgroups: F_{n-1}^{-1} F_n g = F_n g, same size as F_n.
                    return r.family_size;
                },
            },
            family.variant());
    };

    const auto closed_value = options.method == ratio_method::enumeration ? std::nullopt : closed();
    if (options.method == ratio_method::closed_form && !closed_value) {
        throw std::invalid_argument("no closed form for " + family.text() + " in " + to_string(options.mode)
                                    + " mode at n=" + std::to_string(n));
    }
    if (closed_value) {
        r.quotient_size = *closed_value;
        r.method = ratio_method::closed_form;
    } else {
        r.method = ratio_method::enumeration;
        const bool translate_free = !semigroup || is_group(family.tag());
        if (std::holds_alternative<heisbox_family>(family.variant()) && translate_free) {
            // |A^{-1}(B g)| = |A^{-1}B| in a group.
            r.quotient_size = heis_quotient_size(family, n, ks, options.cap).count;
        } else if (std::holds_alternative<multbox_family>(family.variant()) && !semigroup) {
            r.quotient_size = multbox_quotient_size(family, n, ks, options.cap);
        } else {
            r.quotient_size = generic_quotient_size(family, n, ks, options);
        }
    }
    r.ratio = rational(r.quotient_size, r.family_size);
    r.ratio.canonicalize();

    if (!semigroup) {
        if (const auto *h = std::get_if<heisbox_family>(&family.variant()); h && is_default_heisbox(*h)) {
            r.bound = rational(heisenberg_quotient_bound(n), r.family_size);
            r.bound->canonicalize();
        } else if (const auto *m = std::get_if<multbox_family>(&family.variant());
                   m && m->k == multbox_family::kind::paper) {
            r.bound = multbox_ratio_bound(n);
        } else if (std::holds_alternative<interval_family>(family.variant()) && r.nested) {
            r.bound = rational(2);
        } else if (std::holds_alternative<chain_family>(family.variant())) {
            r.bound = rational(1);
        }
    }
    return r;
}

temperedness_report temperedness_scan(const folner_family &family, std::uint64_t n_max, const rational &c_candidate,
                                      const ratio_options &options, const std::vector<semigroup_element> &g_set)
{
    if (n_max < 2) {
        throw std::invalid_argument("temperedness_scan needs n_max >= 2");
    }
    temperedness_report rep;
    rep.family = family.text();
    rep.mode = options.mode;
    rep.n_max = n_max;
    rep.c_candidate = c_candidate;
    for (const auto &g : g_set) {
        rep.g_set.push_back(g.text());
    }
    for (std::uint64_t n = 2; n <= n_max; ++n) {
        std::optional<ratio_result> best;
        if (options.mode == quotient_mode::semigroup && !g_set.empty()) {
            for (const auto &g : g_set) {
                auto o = options;
                o.g = g;
                auto r = tempered_ratio(family, n, o);
                if (!best || r.ratio > best->ratio) {
                    best = std::move(r);
                }
            }
        } else {
            best = tempered_ratio(family, n, options);
        }
        if (rep.ratios.empty() || best->ratio > rep.sup) {
            rep.sup = best->ratio;
            rep.sup_index = n;
        }
        if (!rep.first_violation && best->ratio > c_candidate) {
            rep.first_violation = n;
        }
        rep.ratios.push_back(std::move(*best));
    }
    if (options.mode == quotient_mode::group) {
        std::visit(overloaded{
                       [&](const multbox_family &m) {
                           if (m.k == multbox_family::kind::paper) {
                               // prod_{i>=1} (1 + 1/(i+1)^2) = sinh(pi) / (2 pi).
                               rep.closed_form_bound = std::sinh(std::numbers::pi) / (2 * std::numbers::pi);
                           }
                       },
                       [&](const heisbox_family &h) {
                           if (is_default_heisbox(h)) {
                               // The per-n bound increases to 16.
                               rep.closed_form_bound = 16.0;
                           }
                       },
                       [&](const interval_family &) {
                           if (family.nested_through(n_max)) {
                               rep.closed_form_bound = 2.0;
                           }
                       },
                       [&](const chain_family &) { rep.closed_form_bound = 1.0; },
                   },
                   family.variant());
    }
    return rep;
}

criterion_report criterion_5_3(const int_expr &f, std::uint64_t n_max)
{
    if (n_max < 2) {
        throw std::invalid_argument("criterion_5_3 needs n_max >= 2");
    }
    std::vector<bigint> fv(n_max + 2);
    for (std::uint64_t n = 1; n <= n_max + 1; ++n) {
        fv[n] = eval_at(f, n);
        if (fv[n] < 1) {
            throw std::invalid_argument("f(" + std::to_string(n) + ") must be at least 1");
        }
        if (n > 1 && fv[n] < fv[n - 1]) {
            throw not_nondecreasing("f decreases at n=" + std::to_string(n));
        }
    }
    const std::uint64_t half = (n_max + 2) / 2;
    if (fv[half] == fv[n_max + 1]) {
        throw std::invalid_argument("f is constant on [" + std::to_string(half) + ", " + std::to_string(n_max + 1)
                                    + "]; it does not tend to infinity on this range");
    }
    criterion_report rep;
    rep.f = f.text();
    rep.n_max = n_max;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        rational v(fv[n] * static_cast<unsigned long>(n), fv[n + 1]);
        v.canonicalize();
        if (rep.values.empty() || v > rep.max_value) {
            rep.max_value = v;
            rep.max_index = n;
        }
        rep.values.push_back(std::move(v));
    }
    for (std::uint64_t n = 2; n <= n_max; ++n) {
        rational base(fv[n] + fv[n - 1] + 1, fv[n] + 1);
        base.canonicalize();
        rational p(ipow(base.get_num(), n - 1), ipow(base.get_den(), n - 1));
        rep.box_ratios.push_back(std::move(p));
    }
    bool tail_increasing = true;
    for (std::uint64_t i = rep.values.size() - std::max<std::size_t>(1, rep.values.size() / 4);
         i + 1 < rep.values.size(); ++i) {
        tail_increasing = tail_increasing && rep.values[i] < rep.values[i + 1];
    }
    // Growing means the tail keeps rising and has at least doubled since mid-range.
    const auto &mid = rep.values[rep.values.size() / 2 - 1];
    const bool doubled = rep.values.back() > 2 * mid;
    rep.trend = rep.max_index == n_max && tail_increasing && doubled ? "growing" : "bounded";
    rep.exp_bound = std::exp(to_double(rep.max_value) + 1.0);
    return rep;
}

bigint heisenberg_quotient_bound(std::uint64_t n)
{
    const bigint m(static_cast<unsigned long>(n));
    const bigint side = 2 * (2 * m - 1) + 1;
    return side * side * (4 * (m - 1) * (m - 1) + 2 * m * (m - 1) + 2 * m * m + 1);
}

heis_count_report heisenberg_quotient_count(std::uint64_t n, std::uint64_t cap)
{
    if (n < 2) {
        throw std::invalid_argument("heisenberg_quotient_count needs n >= 2");
    }
    const folner_family family{heisbox_family{}};
    const auto res = heis_quotient_size(family, n, {n - 1}, cap);
    heis_count_report rep;
    rep.n = n;
    rep.count = res.count;
    rep.family_size = family.cardinality(n);
    rep.bound = heisenberg_quotient_bound(n);
    rep.pairs = res.pairs;
    return rep;
}

} // namespace ergodiff

#include <ergodiff/density.hpp>

#include <ergodiff/errors.hpp>

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ergodiff
{

namespace
{

// Number of set bits before each position, from per-word prefix counts.
class rank_index
{
public:
    explicit rank_index(const bitvec &b) : bits_(b)
    {
        const auto w = b.words();
        prefix_.resize(w.size() + 1, 0);
        for (std::size_t i = 0; i < w.size(); ++i) {
            prefix_[i + 1] = prefix_[i] + static_cast<std::uint64_t>(std::popcount(w[i]));
        }
    }
    // Set bits in [0, pos).
    std::uint64_t rank(std::size_t pos) const noexcept
    {
        const auto word = pos >> 6;
        const auto bit = pos & 63;
        std::uint64_t r = prefix_[word];
        if (bit != 0) {
            r += static_cast<std::uint64_t>(std::popcount(bits_.words()[word] & ((std::uint64_t{1} << bit) - 1)));
        }
        return r;
    }

private:
    const bitvec &bits_;
    std::vector<std::uint64_t> prefix_;
};

// Window indices [lo, hi] of F_1..F_n_max, checked against the window.
std::vector<std::pair<std::size_t, std::size_t>> family_windows(const windowed_set &s, const folner_family &family,
                                                                std::uint64_t n_max)
{
    if (!std::holds_alternative<interval_family>(family.variant())) {
        throw tag_mismatch("densities need an interval family over N or Z, got " + family.text());
    }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(n_max);
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        const auto [a, b] = family.interval_bounds(n);
        if (a < s.min_value() || b > s.max_value()) {
            throw family_exceeds_window("F_" + std::to_string(n) + " = [" + a.get_str() + ", " + b.get_str()
                                        + "] leaves the window [" + std::to_string(s.min_value()) + ", "
                                        + std::to_string(s.max_value()) + "]");
        }
        out.emplace_back(s.index(to_int64(a)), s.index(to_int64(b)));
    }
    return out;
}

std::uint64_t tail_start_of(std::uint64_t n_max)
{
    const std::uint64_t len = std::max<std::uint64_t>(1, (n_max + 4) / 5);
    return n_max - len + 1;
}

density_estimate density_from_bits(const bitvec &bits, const std::vector<std::pair<std::size_t, std::size_t>> &windows)
{
    const rank_index r(bits);
    density_estimate est;
    est.n_max = windows.size();
    est.tail_start = tail_start_of(est.n_max);
    est.ratios.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto [lo, hi] = windows[i];
        rational q(bigint(static_cast<unsigned long>(r.rank(hi + 1) - r.rank(lo))),
                   bigint(static_cast<unsigned long>(hi - lo + 1)));
        q.canonicalize();
        if (i + 1 >= est.tail_start) {
            if (i + 1 == est.tail_start || q > est.tail_max) {
                est.tail_max = q;
            }
            if (i + 1 == est.tail_start || q < est.tail_min) {
                est.tail_min = q;
            }
        }
        est.ratios.push_back(std::move(q));
    }
    return est;
}

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

std::string to_string(set_domain d)
{
    return d == set_domain::naturals ? "N" : "Z";
}

windowed_set::windowed_set(set_domain domain, std::uint64_t horizon)
    : domain_(domain), horizon_(horizon),
      bits_(domain == set_domain::naturals ? horizon : 2 * horizon + 1)
{
}

windowed_set::windowed_set(set_domain domain, std::uint64_t horizon, bitvec bits)
    : domain_(domain), horizon_(horizon), bits_(std::move(bits))
{
    const std::size_t expected = domain == set_domain::naturals ? horizon : 2 * horizon + 1;
    if (bits_.size() != expected) {
        throw std::invalid_argument("bitset length " + std::to_string(bits_.size()) + " does not match horizon "
                                    + std::to_string(horizon));
    }
}

windowed_set windowed_set::from_predicate(set_domain domain, std::uint64_t horizon,
                                          const std::function<bool(std::int64_t)> &member)
{
    windowed_set s(domain, horizon);
    for (auto x = s.min_value(); x <= s.max_value(); ++x) {
        if (member(x)) {
            s.bits_.set(s.index(x));
        }
    }
    return s;
}

windowed_set windowed_set::from_members(set_domain domain, std::uint64_t horizon,
                                        std::span<const std::int64_t> members)
{
    windowed_set s(domain, horizon);
    for (auto x : members) {
        if (!s.in_window(x)) {
            throw std::invalid_argument("member " + std::to_string(x) + " outside the window");
        }
        s.bits_.set(s.index(x));
    }
    return s;
}

std::vector<std::int64_t> windowed_set::members() const
{
    std::vector<std::int64_t> out;
    for (auto i = bits_.find_next(0); i != bitvec::npos; i = bits_.find_next(i + 1)) {
        out.push_back(value(i));
    }
    return out;
}

windowed_set windowed_set::complement() const
{
    return windowed_set(domain_, horizon_, ~bits_);
}

windowed_set build_set(std::string_view spec, set_domain domain, std::uint64_t horizon)
{
    const std::string s(spec);
    const auto colon = s.find(':');
    const std::string head = s.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (head == "all") {
        return windowed_set::from_predicate(domain, horizon, [](std::int64_t) { return true; });
    }
    if (head == "squares") {
        return windowed_set::from_predicate(domain, horizon, [](std::int64_t x) {
            if (x < 0) {
                return false;
            }
            const auto r = isqrt(static_cast<u128>(x));
            return static_cast<std::int64_t>(r * r) == x;
        });
    }
    if (head == "mult") {
        const auto k = parse_rational(body);
        if (k.get_den() != 1 || k < 1 || !fits_int64(k.get_num())) {
            throw parse_error("mult:k needs a positive integer k");
        }
        const auto m = to_int64(k.get_num());
        return windowed_set::from_predicate(domain, horizon, [m](std::int64_t x) { return x % m == 0; });
    }
    if (head == "list") {
        std::vector<std::int64_t> xs;
        std::stringstream ss(body);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const auto q = parse_rational(tok);
            if (q.get_den() != 1 || !fits_int64(q.get_num())) {
                throw parse_error("list: '" + tok + "' is not an integer");
            }
            xs.push_back(to_int64(q.get_num()));
        }
        return windowed_set::from_members(domain, horizon, xs);
    }
    if (head == "floor-even") {
        if (domain != set_domain::naturals) {
            throw std::invalid_argument("floor-even sets live in N");
        }
        const auto values = floor_values(sequence_spec::parse(body), horizon);
        return windowed_set::from_predicate(domain, horizon, [&](std::int64_t n) {
            return values[static_cast<std::size_t>(n - 1)] % 2 == 0;
        });
    }
    if (head == "example-3-13") {
        if (domain != set_domain::naturals) {
            throw std::invalid_argument("example-3-13 lives in N");
        }
        return windowed_set::from_predicate(domain, horizon,
                                            [](std::int64_t n) { return member_3_13(static_cast<std::uint64_t>(n)); });
    }
    if (head == "rle") {
        return from_rle_json(read_file(body));
    }
    if (head == "lines") {
        return from_lines(read_file(body), domain, horizon);
    }
    throw parse_error("unknown set '" + s + "'");
}

density_estimate windowed_density(const windowed_set &s, const folner_family &family, std::uint64_t n_max)
{
    if (n_max == 0) {
        throw std::invalid_argument("windowed_density needs n_max >= 1");
    }
    return density_from_bits(s.bits(), family_windows(s, family, n_max));
}

windowed_set delta1(const windowed_set &s)
{
    const auto span = static_cast<std::uint64_t>(s.max_value() - s.min_value());
    windowed_set out(set_domain::integers, span);
    bitvec bits(2 * span + 1);
    for (std::uint64_t d = 0; d <= span; ++d) {
        if (s.bits().intersects_shifted(s.bits(), d)) {
            bits.set(span + d);
            bits.set(span - d);
        }
    }
    return windowed_set(set_domain::integers, span, std::move(bits));
}

windowed_set delta1_bruteforce(const windowed_set &s)
{
    const auto span = static_cast<std::uint64_t>(s.max_value() - s.min_value());
    const auto m = s.members();
    std::vector<std::int64_t> diffs;
    for (auto a : m) {
        for (auto b : m) {
            diffs.push_back(a - b);
        }
    }
    std::sort(diffs.begin(), diffs.end());
    diffs.erase(std::unique(diffs.begin(), diffs.end()), diffs.end());
    return windowed_set::from_members(set_domain::integers, span, diffs);
}

windowed_set delta2_g(const windowed_set &s, const sequence_spec &g, const delta2_options &options)
{
    const folner_family standard{interval_family{}};
    const auto &family = options.family != nullptr ? *options.family : standard;
    const auto family_n_max = options.family_n_max != 0 ? options.family_n_max : s.horizon();
    const auto n_max = options.n_max != 0 ? options.n_max : s.horizon();
    const auto windows = family_windows(s, family, family_n_max);
    const auto tail = tail_start_of(family_n_max);
    const rational theta = rational(options.theta);
    const auto shifts = floor_values(g, n_max, options.precision);

    windowed_set out(set_domain::naturals, n_max);
    bitvec bits(n_max);
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        const auto k = shifts[n - 1];
        if (k < 0 || static_cast<std::uint64_t>(k) >= s.bits().size()) {
            continue;
        }
        const auto inter = s.bits().and_shift_down(static_cast<std::size_t>(k));
        const rank_index r(inter);
        for (std::uint64_t m = tail; m <= family_n_max; ++m) {
            const auto [lo, hi] = windows[m - 1];
            const rational q(bigint(static_cast<unsigned long>(r.rank(hi + 1) - r.rank(lo))),
                             bigint(static_cast<unsigned long>(hi - lo + 1)));
            if (q >= theta) {
                bits.set(n - 1);
                break;
            }
        }
    }
    return windowed_set(set_domain::naturals, n_max, std::move(bits));
}

std::uint64_t delta3_count(const windowed_set &s, std::int64_t n)
{
    // |{x in S : x + n in S}|
    const auto shift = static_cast<std::size_t>(n >= 0 ? n : -n);
    if (shift >= s.bits().size()) {
        return 0;
    }
    return s.bits().count_shifted(s.bits(), shift);
}

gap_run_stats gap_run_stats_of(const windowed_set &s)
{
    gap_run_stats st;
    std::uint64_t run = 0;
    std::size_t prev = bitvec::npos;
    for (auto i = s.bits().find_next(0); i != bitvec::npos; i = s.bits().find_next(i + 1)) {
        if (prev != bitvec::npos) {
            const auto gap = static_cast<std::uint64_t>(i - prev);
            ++st.gap_histogram[gap];
            st.first_gap_of_length.try_emplace(gap, s.value(prev));
            st.max_gap = std::max(st.max_gap, gap);
            run = gap == 1 ? run + 1 : 1;
        } else {
            run = 1;
        }
        st.max_run = std::max(st.max_run, run);
        prev = i;
    }
    return st;
}

bool member_3_13(std::uint64_t n)
{
    const u128 v = static_cast<u128>(2) * n + isqrt(static_cast<u128>(4) * n);
    return v % 4 == 0;
}

bool member_3_14(std::uint64_t n)
{
    if (n >= (std::uint64_t{1} << 42)) {
        return member_3_14_mpz(n);
    }
    const u128 cube = static_cast<u128>(n) * n * n;
    return isqrt(cube) % 2 == 0;
}

bool member_3_13_mpz(std::uint64_t n)
{
    const bigint m(static_cast<unsigned long>(n));
    const bigint v = 2 * m + integer_root(4 * m, 2);
    return mpz_divisible_ui_p(v.get_mpz_t(), 4) != 0;
}

bool member_3_14_mpz(std::uint64_t n)
{
    const bigint m(static_cast<unsigned long>(n));
    const bigint r = integer_root(m * m * m, 2);
    return mpz_even_p(r.get_mpz_t()) != 0;
}

example_3_13_report verify_example_3_13(std::uint64_t horizon)
{
    example_3_13_report rep;
    rep.horizon = horizon;
    bool prev = false;
    for (std::uint64_t n = 1; n <= horizon; ++n) {
        const bool cur = member_3_13(n);
        rep.members += cur ? 1 : 0;
        if (prev && cur) {
            rep.violations.push_back(n - 1);
        }
        prev = cur;
    }
    return rep;
}

gap_search_result find_gap_3_14(std::uint64_t run_length, std::uint64_t bound)
{
    gap_search_result res;
    res.run_length = run_length;
    res.bound = bound;
    std::uint64_t streak = 0;
    for (std::uint64_t n = 1; n <= bound + run_length; ++n) {
        streak = member_3_14(n) ? 0 : streak + 1;
        if (streak == run_length + 1) {
            const auto m = n - run_length;
            if (m > bound) {
                break;
            }
            res.m = m;
            break;
        }
    }
    if (res.m) {
        res.verified = true;
        for (std::uint64_t k = 0; k <= run_length; ++k) {
            res.verified = res.verified && !member_3_14_mpz(*res.m + k);
        }
    }
    return res;
}

std::optional<cover_certificate> cover_search(const windowed_set &e, std::uint64_t target_m,
                                              const cover_options &options)
{
    if (e.domain() != set_domain::integers) {
        throw std::invalid_argument("cover_search needs a set over Z");
    }
    if (target_m > e.horizon()) {
        throw std::invalid_argument("target [-M, M] is larger than the window");
    }
    const auto m = static_cast<std::int64_t>(target_m);
    const auto slack = static_cast<std::int64_t>(e.horizon()) - m;
    const std::size_t width = static_cast<std::size_t>(2 * m + 1);

    // Candidates 0, 1, ..., slack, -1, ..., -slack; one per distinct coverage pattern.
    std::vector<std::int64_t> order;
    for (std::int64_t t = 0; t <= slack; ++t) {
        order.push_back(t);
    }
    for (std::int64_t t = -1; t >= -slack; --t) {
        order.push_back(t);
    }
    std::vector<std::int64_t> cand;
    std::vector<bitvec> patterns;
    std::map<std::vector<std::uint64_t>, std::size_t> seen;
    for (auto t : order) {
        bitvec p(width);
        for (std::int64_t x = -m; x <= m; ++x) {
            if (e.contains(x - t)) {
                p.set(static_cast<std::size_t>(x + m));
            }
        }
        if (!p.any()) {
            continue;
        }
        std::vector<std::uint64_t> key(p.words().begin(), p.words().end());
        if (seen.emplace(std::move(key), patterns.size()).second) {
            cand.push_back(t);
            patterns.push_back(std::move(p));
        }
    }

    bitvec full(width);
    full.set_range(0, width);

    // Greedy.
    std::vector<std::size_t> greedy;
    bitvec covered(width);
    while (covered != full) {
        std::size_t best = patterns.size();
        std::uint64_t best_gain = 0;
        const auto missing = ~covered;
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            auto gain_bits = patterns[i];
            gain_bits &= missing;
            const auto gain = gain_bits.count();
            if (gain > best_gain) {
                best_gain = gain;
                best = i;
            }
        }
        if (best == patterns.size()) {
            break;
        }
        greedy.push_back(best);
        covered |= patterns[best];
    }
    const bool greedy_ok = covered == full;

    // Exact search below the greedy size, branching on the first uncovered point.
    std::uint64_t nodes = 0;
    bool budget_hit = false;
    std::vector<std::size_t> chosen;
    std::function<bool(const bitvec &, std::uint64_t)> dfs = [&](const bitvec &cov, std::uint64_t left) -> bool {
        if (cov == full) {
            return true;
        }
        if (left == 0 || ++nodes > options.node_budget) {
            budget_hit = budget_hit || nodes > options.node_budget;
            return false;
        }
        const auto hole = (~cov).find_next(0);
        for (std::size_t i = 0; i < patterns.size(); ++i) {
            if (!patterns[i].test(hole)) {
                continue;
            }
            auto next = cov;
            next |= patterns[i];
            chosen.push_back(i);
            if (dfs(next, left - 1)) {
                return true;
            }
            chosen.pop_back();
        }
        return false;
    };

    const std::uint64_t limit = greedy_ok ? std::min<std::uint64_t>(greedy.size() - 1, options.ell_max)
                                          : options.ell_max;
    std::optional<std::vector<std::size_t>> best;
    bool exhaustive = true;
    for (std::uint64_t ell = 1; ell <= limit; ++ell) {
        chosen.clear();
        if (dfs(bitvec(width), ell)) {
            best = chosen;
            break;
        }
        if (budget_hit) {
            exhaustive = false;
            break;
        }
    }
    if (!best) {
        if (!greedy_ok || greedy.size() > options.ell_max) {
            return std::nullopt;
        }
        best = greedy;
    }

    cover_certificate cert;
    for (auto i : *best) {
        cert.translates.push_back(cand[i]);
    }
    std::sort(cert.translates.begin(), cert.translates.end());
    cert.target_lo = -m;
    cert.target_hi = m;
    cert.ell = cert.translates.size();
    cert.greedy_ell = greedy_ok ? greedy.size() : 0;
    cert.minimal = exhaustive;
    cert.verified = verify_cover(e, cert);
    return cert;
}

bool verify_cover(const windowed_set &e, const cover_certificate &cert)
{
    for (auto x = cert.target_lo; x <= cert.target_hi; ++x) {
        const bool hit = std::any_of(cert.translates.begin(), cert.translates.end(),
                                     [&](std::int64_t t) { return e.contains(x - t); });
        if (!hit) {
            return false;
        }
    }
    return true;
}

density_estimate intersection_density(const windowed_set &s, std::span<const std::int64_t> shifts,
                                      const folner_family &family, std::uint64_t n_max)
{
    bitvec bits = s.bits();
    for (auto k : shifts) {
        if (k < 0) {
            throw std::invalid_argument("shifts must be nonnegative");
        }
        if (static_cast<std::uint64_t>(k) >= bits.size()) {
            bits = bitvec(bits.size());
            continue;
        }
        bits &= s.bits().and_shift_down(static_cast<std::size_t>(k));
    }
    return density_from_bits(bits, family_windows(s, family, n_max));
}

std::string to_rle_json(const windowed_set &s)
{
    nlohmann::json runs = nlohmann::json::array();
    const auto &b = s.bits();
    for (auto i = b.find_next(0); i != bitvec::npos;) {
        auto j = i;
        while (j + 1 < b.size() && b.test(j + 1)) {
            ++j;
        }
        runs.push_back({s.value(i), s.value(j)});
        i = b.find_next(j + 1);
    }
    nlohmann::json j;
    j["domain"] = to_string(s.domain());
    j["horizon"] = s.horizon();
    j["runs"] = std::move(runs);
    return j.dump();
}

windowed_set from_rle_json(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
        const auto dom = j.at("domain").get<std::string>();
        if (dom != "N" && dom != "Z") {
            throw parse_error("domain must be N or Z");
        }
        windowed_set s(dom == "N" ? set_domain::naturals : set_domain::integers, j.at("horizon").get<std::uint64_t>());
        bitvec bits(s.bits().size());
        for (const auto &run : j.at("runs")) {
            const auto a = run.at(0).get<std::int64_t>();
            const auto b = run.at(1).get<std::int64_t>();
            if (b < a || !s.in_window(a) || !s.in_window(b)) {
                throw parse_error("run [" + std::to_string(a) + ", " + std::to_string(b) + "] is invalid");
            }
            bits.set_range(s.index(a), s.index(b) + 1);
        }
        return windowed_set(s.domain(), s.horizon(), std::move(bits));
    } catch (const nlohmann::json::exception &e) {
        throw parse_error(std::string("set JSON: ") + e.what());
    }
}

std::string to_lines(const windowed_set &s)
{
    std::string out;
    for (auto x : s.members()) {
        out += std::to_string(x);
        out += '\n';
    }
    return out;
}

windowed_set from_lines(std::string_view text, set_domain domain, std::uint64_t horizon)
{
    std::vector<std::int64_t> xs;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) {
            continue;
        }
        const auto e = line.find_last_not_of(" \t\r");
        const auto q = parse_rational(line.substr(b, e - b + 1));
        if (q.get_den() != 1 || !fits_int64(q.get_num())) {
            throw parse_error("'" + line + "' is not an integer");
        }
        xs.push_back(to_int64(q.get_num()));
    }
    return windowed_set::from_members(domain, horizon, xs);
}

} // namespace ergodiff

#include <ergodiff/dynamics.hpp>

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

std::vector<std::string> split(const std::string &s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) {
        out.push_back(part);
    }
    if (!s.empty() && s.back() == sep) {
        out.emplace_back();
    }
    return out;
}

rational frac_of(const rational &x)
{
    rational f = x - rational(floor(x));
    f.canonicalize();
    return f;
}

std::uint64_t parse_u64(const std::string &s, const char *what)
{
    const auto q = parse_rational(s);
    if (q.get_den() != 1 || q < 0 || !q.get_num().fits_ulong_p()) {
        throw parse_error(std::string(what) + ": '" + s + "' is not a nonnegative integer");
    }
    return q.get_num().get_ui();
}

std::vector<const rotation_system *> factors_of(const rotation_system &system)
{
    std::vector<const rotation_system *> out;
    if (const auto *p = std::get_if<product_system>(&system.variant())) {
        for (const auto &f : p->factors) {
            out.push_back(&f);
        }
    } else {
        out.push_back(&system);
    }
    return out;
}

void validate(const rotation_system &system, const observable &obs, const start_point *x0)
{
    const auto fs = factors_of(system);
    if (obs.factors.size() != fs.size()) {
        throw std::invalid_argument("observable has " + std::to_string(obs.factors.size())
                                    + " factors, system has " + std::to_string(fs.size()));
    }
    if (x0 != nullptr && x0->coords.size() != fs.size()) {
        throw std::invalid_argument("start point has " + std::to_string(x0->coords.size())
                                    + " coordinates, system has " + std::to_string(fs.size()));
    }
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const auto &o = obs.factors[i];
        if (const auto *c = std::get_if<cyclic_system>(&fs[i]->variant())) {
            if (o.is_arcs) {
                throw std::invalid_argument("cyclic factor needs a residue observable");
            }
            for (auto r : o.residues) {
                if (r >= c->m) {
                    throw std::invalid_argument("residue " + std::to_string(r) + " out of range");
                }
            }
            if (x0 != nullptr && x0->coords[i].get_den() != 1) {
                throw std::invalid_argument("cyclic start coordinate must be an integer");
            }
        } else if (!o.is_arcs) {
            throw std::invalid_argument("circle factor needs an arc observable");
        }
    }
}

enum class member { in, out, ambiguous };

// Wrapped distance between two phases.
u128 phase_distance(u128 a, u128 b) noexcept
{
    const u128 d = a - b;
    const u128 e = b - a;
    return d < e ? d : e;
}

struct arc_phase {
    u128 start = 0;
    u128 length = 0;
    bool whole = false;
    u128 slack = 0;
};

struct circle_probe {
    bool rational_alpha = false;
    rational alpha;
    phase alpha_phase;
    rational x0;
    phase x0_phase;
    std::vector<arc> arcs;
    std::vector<arc_phase> arc_phases;

    member classify(std::int64_t a) const
    {
        if (rational_alpha) {
            const rational p = frac_of(x0 + alpha * a);
            for (const auto &ar : arcs) {
                const rational d = frac_of(p - ar.start);
                if (d < ar.length) {
                    return member::in;
                }
            }
            return member::out;
        }
        const u128 p = x0_phase.value + phase_times(alpha_phase, a);
        const u128 err = phase_error(alpha_phase, a) + (x0_phase.exact ? 0 : 1);
        bool ambiguous = false;
        for (const auto &ar : arc_phases) {
            if (ar.whole) {
                return member::in;
            }
            const u128 tol = err + ar.slack;
            if (phase_distance(p, ar.start) <= tol || phase_distance(p, ar.start + ar.length) <= tol) {
                ambiguous = true;
                continue;
            }
            if (static_cast<u128>(p - ar.start) < ar.length) {
                return member::in;
            }
        }
        return ambiguous ? member::ambiguous : member::out;
    }
};

struct cyclic_probe {
    std::uint64_t m = 1;
    std::uint64_t x0 = 0;
    std::vector<bool> in;

    member classify(std::int64_t a) const
    {
        const auto mm = static_cast<std::int64_t>(m);
        const auto r = ((static_cast<std::int64_t>(x0 % m) + a % mm) % mm + mm) % mm;
        return in[static_cast<std::size_t>(r)] ? member::in : member::out;
    }
};

using probe = std::variant<circle_probe, cyclic_probe>;

std::vector<probe> make_probes(const rotation_system &system, const start_point &x0, const observable &obs)
{
    validate(system, obs, &x0);
    std::vector<probe> out;
    const auto fs = factors_of(system);
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (const auto *c = std::get_if<cyclic_system>(&fs[i]->variant())) {
            cyclic_probe p;
            p.m = c->m;
            p.x0 = mod_floor(x0.coords[i].get_num(), bigint(static_cast<unsigned long>(c->m))).get_ui();
            p.in.assign(c->m, false);
            for (auto r : obs.factors[i].residues) {
                p.in[r] = true;
            }
            out.emplace_back(std::move(p));
            continue;
        }
        const auto &circle = std::get<circle_system>(fs[i]->variant());
        circle_probe p;
        p.rational_alpha = circle.alpha.exact().has_value();
        if (p.rational_alpha) {
            p.alpha = *circle.alpha.exact();
        }
        p.alpha_phase = to_phase(circle.alpha);
        p.x0 = frac_of(x0.coords[i]);
        p.x0_phase = to_phase(p.x0);
        p.arcs = obs.factors[i].arcs;
        for (const auto &ar : p.arcs) {
            arc_phase ap;
            ap.whole = ar.length >= 1;
            const auto s = to_phase(ar.start);
            const auto e = to_phase(ar.start + ar.length);
            ap.start = s.value;
            ap.length = e.value - s.value;
            ap.slack = 2;
            p.arc_phases.push_back(ap);
        }
        out.emplace_back(std::move(p));
    }
    return out;
}

double theta_double(const circle_system &c, std::int64_t a)
{
    if (const auto &q = c.alpha.exact()) {
        return to_double(frac_of(*q * a));
    }
    return phase_to_double(phase_times(to_phase(c.alpha), a));
}

} // namespace

rotation_system::rotation_system(variant_type v) : v_(std::move(v))
{
    if (const auto *c = std::get_if<cyclic_system>(&v_); c && c->m == 0) {
        throw std::invalid_argument("cyclic system needs m >= 1");
    }
    if (const auto *p = std::get_if<product_system>(&v_)) {
        if (p->factors.empty()) {
            throw std::invalid_argument("product system needs at least one factor");
        }
        for (const auto &f : p->factors) {
            if (std::holds_alternative<product_system>(f.variant())) {
                throw std::invalid_argument("nested products are not supported");
            }
        }
    }
}

rotation_system rotation_system::parse(std::string_view text)
{
    const std::string s(text);
    const auto colon = s.find(':');
    const std::string head = s.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : s.substr(colon + 1);
    try {
        if (head == "circle") {
            const std::string value = body.rfind("alpha=", 0) == 0 ? body.substr(6) : body;
            return rotation_system{circle_system{real_constant::parse(value)}};
        }
        if (head == "cyclic") {
            const std::string value = body.rfind("m=", 0) == 0 ? body.substr(2) : body;
            return rotation_system{cyclic_system{parse_u64(value, "cyclic m")}};
        }
        if (head == "product") {
            product_system p;
            for (const auto &part : split(body, '|')) {
                p.factors.push_back(parse(part));
            }
            return rotation_system{std::move(p)};
        }
    } catch (const std::invalid_argument &e) {
        throw parse_error(e.what());
    }
    throw parse_error("unknown system '" + s + "'");
}

std::string rotation_system::text() const
{
    return std::visit(overloaded{
                          [](const circle_system &c) { return "circle:alpha=" + c.alpha.text(); },
                          [](const cyclic_system &c) { return "cyclic:m=" + std::to_string(c.m); },
                          [](const product_system &p) {
                              std::string s = "product:";
                              for (std::size_t i = 0; i < p.factors.size(); ++i) {
                                  s += (i ? "|" : "") + p.factors[i].text();
                              }
                              return s;
                          },
                      },
                      v_);
}

std::size_t rotation_system::arity() const
{
    if (const auto *p = std::get_if<product_system>(&v_)) {
        return p->factors.size();
    }
    return 1;
}

observable observable::parse(std::string_view text)
{
    observable obs;
    for (const auto &part : split(std::string(text), '|')) {
        const auto colon = part.find(':');
        const std::string head = part.substr(0, colon);
        const std::string body = colon == std::string::npos ? "" : part.substr(colon + 1);
        factor_observable f;
        if (head == "arc" || head == "arcs") {
            for (const auto &piece : split(body, ';')) {
                const auto fields = split(piece, ',');
                if (fields.size() != 2) {
                    throw parse_error("arc needs start,length: '" + piece + "'");
                }
                arc a{frac_of(parse_rational(fields[0])), parse_rational(fields[1])};
                if (a.length <= 0 || a.length > 1) {
                    throw parse_error("arc length must lie in (0, 1]");
                }
                f.arcs.push_back(std::move(a));
            }
            std::sort(f.arcs.begin(), f.arcs.end(), [](const arc &x, const arc &y) { return x.start < y.start; });
            rational total = 0;
            for (std::size_t i = 0; i < f.arcs.size(); ++i) {
                total += f.arcs[i].length;
                const rational end = f.arcs[i].start + f.arcs[i].length;
                const rational next = i + 1 < f.arcs.size() ? f.arcs[i + 1].start : f.arcs[0].start + 1;
                if (end > next) {
                    throw parse_error("arcs overlap");
                }
            }
            if (total > 1) {
                throw parse_error("arcs exceed the circle");
            }
        } else if (head == "res") {
            f.is_arcs = false;
            for (const auto &r : split(body, ',')) {
                f.residues.push_back(parse_u64(r, "residue"));
            }
            std::sort(f.residues.begin(), f.residues.end());
            f.residues.erase(std::unique(f.residues.begin(), f.residues.end()), f.residues.end());
        } else {
            throw parse_error("unknown observable '" + part + "'");
        }
        obs.factors.push_back(std::move(f));
    }
    return obs;
}

std::string observable::text() const
{
    std::string s;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) {
            s += "|";
        }
        const auto &f = factors[i];
        if (f.is_arcs) {
            s += f.arcs.size() == 1 ? "arc:" : "arcs:";
            for (std::size_t j = 0; j < f.arcs.size(); ++j) {
                s += (j ? ";" : "") + to_string(f.arcs[j].start) + "," + to_string(f.arcs[j].length);
            }
        } else {
            s += "res:";
            for (std::size_t j = 0; j < f.residues.size(); ++j) {
                s += (j ? "," : "") + std::to_string(f.residues[j]);
            }
        }
    }
    return s;
}

std::vector<rational> observable::measures(const rotation_system &system) const
{
    validate(system, *this, nullptr);
    const auto fs = factors_of(system);
    std::vector<rational> out;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        rational mu = 0;
        if (factors[i].is_arcs) {
            for (const auto &a : factors[i].arcs) {
                mu += a.length;
            }
        } else {
            const auto m = std::get<cyclic_system>(fs[i]->variant()).m;
            mu = rational(bigint(static_cast<unsigned long>(factors[i].residues.size())),
                          bigint(static_cast<unsigned long>(m)));
        }
        mu.canonicalize();
        out.push_back(mu);
    }
    return out;
}

start_point start_point::parse(std::string_view text)
{
    start_point p;
    for (const auto &part : split(std::string(text), '|')) {
        p.coords.push_back(parse_rational(part));
    }
    return p;
}

start_point start_point::origin(const rotation_system &system)
{
    return start_point{std::vector<rational>(system.arity(), rational(0))};
}

orbit_average_report orbit_average_report_of(const rotation_system &system, const start_point &x0,
                                             const observable &obs, std::span<const std::int64_t> values)
{
    const auto probes = make_probes(system, x0, obs);
    orbit_average_report rep;
    rep.n = values.size();
    for (auto a : values) {
        member m = member::in;
        for (const auto &p : probes) {
            const auto c = std::visit([&](const auto &pr) { return pr.classify(a); }, p);
            if (c == member::out) {
                m = member::out;
                break;
            }
            if (c == member::ambiguous) {
                m = member::ambiguous;
            }
        }
        rep.hits += m == member::in ? 1 : 0;
        rep.boundary_failures += m == member::ambiguous ? 1 : 0;
    }
    rep.average = rep.n == 0 ? 0.0 : static_cast<double>(rep.hits) / static_cast<double>(rep.n);
    return rep;
}

double orbit_average(const rotation_system &system, const start_point &x0, const observable &obs,
                     std::span<const std::int64_t> values)
{
    const auto rep = orbit_average_report_of(system, x0, obs, values);
    if (rep.boundary_failures != 0) {
        throw boundary_ambiguous(std::to_string(rep.boundary_failures)
                                 + " orbit points lie within the precision radius of an arc endpoint");
    }
    return rep.average;
}

rational arc_overlap(const rational &beta, const rational &theta)
{
    const rational t = frac_of(theta);
    rational mu = 0;
    if (beta > t) {
        mu += beta - t;
    }
    if (t + beta > 1) {
        mu += t + beta - 1;
    }
    mu.canonicalize();
    return mu;
}

u128 arc_overlap_phase(u128 beta_phase, u128 theta_phase) noexcept
{
    u128 mu = beta_phase > theta_phase ? beta_phase - theta_phase : 0;
    const u128 sum = beta_phase + theta_phase;
    if (sum < theta_phase) {
        // Wrapped: θ + β - 1.
        mu += sum;
    }
    return mu;
}

recurrence_report recurrence_average(const circle_system &circle, const rational &beta,
                                     std::span<const std::int64_t> values)
{
    if (beta <= 0 || beta > 1) {
        throw std::invalid_argument("beta must lie in (0, 1]");
    }
    recurrence_report rep;
    rep.n = values.size();
    if (values.empty()) {
        return rep;
    }
    rep.min_term = std::numeric_limits<double>::infinity();
    rep.max_term = -std::numeric_limits<double>::infinity();
    if (circle.alpha.exact() || beta == 1) {
        rep.exact = true;
        rational sum = 0;
        for (auto a : values) {
            const rational term = beta == 1 ? rational(1)
                                            : arc_overlap(beta, *circle.alpha.exact() * a);
            sum += term;
            const double d = to_double(term);
            rep.min_term = std::min(rep.min_term, d);
            rep.max_term = std::max(rep.max_term, d);
        }
        rep.average = to_double(sum / rational(static_cast<unsigned long>(values.size())));
        return rep;
    }
    const u128 beta_phase = to_phase(beta).value;
    const phase alpha = to_phase(circle.alpha);
    bigint sum = 0;
    for (auto a : values) {
        const u128 term = arc_overlap_phase(beta_phase, phase_times(alpha, a));
        sum += from_u128(term);
        const double d = phase_to_double(term);
        rep.min_term = std::min(rep.min_term, d);
        rep.max_term = std::max(rep.max_term, d);
    }
    const rational avg(sum, bigint(static_cast<unsigned long>(values.size())) << 128);
    rep.average = to_double(avg);
    return rep;
}

double arcs_overlap(const std::vector<arc> &arcs, double theta)
{
    double mu = 0;
    for (const auto &i : arcs) {
        const double s = to_double(i.start);
        const double e = s + to_double(i.length);
        for (const auto &j : arcs) {
            double t = to_double(j.start) + theta;
            t -= std::floor(t);
            const double len = to_double(j.length);
            for (int k = -1; k <= 1; ++k) {
                const double lo = std::max(s, t + k);
                const double hi = std::min(e, t + k + len);
                if (hi > lo) {
                    mu += hi - lo;
                }
            }
        }
    }
    return mu;
}

double product_recurrence(const rotation_system &system, const observable &obs, std::span<const std::int64_t> values)
{
    validate(system, obs, nullptr);
    const auto fs = factors_of(system);
    double sum = 0;
    for (auto a : values) {
        double term = 1;
        for (std::size_t i = 0; i < fs.size() && term != 0; ++i) {
            if (const auto *c = std::get_if<cyclic_system>(&fs[i]->variant())) {
                const auto m = static_cast<std::int64_t>(c->m);
                const auto &res = obs.factors[i].residues;
                std::uint64_t hit = 0;
                for (auto r : res) {
                    const auto back = ((static_cast<std::int64_t>(r) - a % m) % m + m) % m;
                    hit += std::binary_search(res.begin(), res.end(), static_cast<std::uint64_t>(back)) ? 1 : 0;
                }
                term *= static_cast<double>(hit) / static_cast<double>(c->m);
            } else {
                const auto &circle = std::get<circle_system>(fs[i]->variant());
                term *= arcs_overlap(obs.factors[i].arcs, theta_double(circle, a));
            }
        }
        sum += term;
    }
    return values.empty() ? 0.0 : sum / static_cast<double>(values.size());
}

} // namespace ergodiff

#include "cli.hpp"

#include <ergodiff/density.hpp>
#include <ergodiff/dynamics.hpp>
#include <ergodiff/equidistribution.hpp>
#include <ergodiff/errors.hpp>
#include <ergodiff/folner.hpp>
#include <ergodiff/report_json.hpp>
#include <ergodiff/sequences.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace ergodiff::cli
{

namespace
{

using nlohmann::json;

// A report and whether its answer is indeterminate.
struct outcome {
    outcome(json r) : result(std::move(r)) {}

    json result;
    bool indeterminate = false;
    // Rows for --output csv; empty header means the report is not tabular.
    std::vector<std::string> csv_header;
    std::vector<std::vector<std::string>> csv_rows;
};

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t default_precision_cap()
{
    if (const char *env = std::getenv("ERGODIFF_PRECISION_CAP")) {
        try {
            const auto v = std::stoull(env);
            if (v >= 64) {
                return v;
            }
        } catch (const std::exception &) {
        }
    }
    return precision_policy{}.cap_bits;
}

std::string fmt(double x)
{
    return json(x).dump();
}

struct globals {
    std::optional<std::uint64_t> horizon;
    std::optional<std::uint64_t> n;
    std::uint64_t precision_bits = default_precision_cap();
    double theta = 1e-3;
    std::string output = "json";
    std::uint64_t seed = 0;
    std::uint64_t cap = default_enumeration_cap;
};

class context
{
public:
    explicit context(globals &g) : g_(g) {}

    std::uint64_t horizon(std::uint64_t fallback)
    {
        const auto v = g_.horizon.value_or(fallback);
        resolved_["horizon"] = v;
        return v;
    }
    std::uint64_t n(std::uint64_t fallback)
    {
        const auto v = g_.n.value_or(fallback);
        resolved_["N"] = v;
        return v;
    }
    precision_policy precision()
    {
        resolved_["precision_bits"] = g_.precision_bits;
        precision_policy p;
        p.cap_bits = static_cast<mpfr_prec_t>(g_.precision_bits);
        return p;
    }
    double theta()
    {
        resolved_["theta"] = g_.theta;
        return g_.theta;
    }
    std::uint64_t seed()
    {
        resolved_["seed"] = g_.seed;
        return g_.seed;
    }
    std::uint64_t cap()
    {
        resolved_["cap"] = g_.cap;
        return g_.cap;
    }
    const json &resolved() const
    {
        return resolved_;
    }

private:
    globals &g_;
    json resolved_ = json::object();
};

// Values of a subcommand's own options, defaults included, in declaration order.
json option_values(const CLI::App &sub)
{
    json cfg = json::object();
    for (const auto *opt : sub.get_options()) {
        const auto &name = opt->get_single_name();
        if (name == "help" || name.empty()) {
            continue;
        }
        if (opt->get_type_size() == 0) {
            cfg[name] = opt->count() > 0;
            continue;
        }
        if (opt->count() > 0) {
            const auto &r = opt->results();
            std::string joined;
            for (std::size_t i = 0; i < r.size(); ++i) {
                joined += (i ? "," : "") + r[i];
            }
            cfg[name] = joined;
        } else {
            cfg[name] = opt->get_default_str();
        }
    }
    return cfg;
}

set_domain parse_domain(const std::string &d)
{
    if (d == "N") {
        return set_domain::naturals;
    }
    if (d == "Z") {
        return set_domain::integers;
    }
    throw usage_error("--domain must be N or Z");
}

// Independent Bernoulli(p) membership from a 64-bit Mersenne twister.
windowed_set random_set(set_domain domain, std::uint64_t horizon, double p, std::uint64_t seed)
{
    if (!(p >= 0 && p <= 1)) {
        throw usage_error("--random density must lie in [0, 1]");
    }
    std::mt19937_64 rng(seed);
    return windowed_set::from_predicate(domain, horizon, [&](std::int64_t) {
        return static_cast<double>(rng() >> 11) * 0x1p-53 < p;
    });
}

struct set_args {
    std::string spec = "mult:4";
    std::string domain = "N";
    std::optional<double> random;
};

void add_set_options(CLI::App *sub, set_args &a)
{
    sub->add_option("--set", a.spec, "set: all | squares | mult:k | list:a,b,... | floor-even:<seq> | example-3-13 | "
                                     "rle:<file> | lines:<file>")
        ->capture_default_str();
    sub->add_option("--domain", a.domain, "N (window [1,H]) or Z (window [-H,H])")->capture_default_str();
    sub->add_option("--random", a.random, "random set with this density (uses --seed) instead of --set");
}

windowed_set make_set(context &ctx, const set_args &a, std::uint64_t default_horizon)
{
    const auto domain = parse_domain(a.domain);
    const auto h = ctx.horizon(default_horizon);
    if (a.random) {
        return random_set(domain, h, *a.random, ctx.seed());
    }
    return build_set(a.spec, domain, h);
}

json set_json(const windowed_set &s)
{
    return {{"count", s.count()}, {"set", json::parse(to_rle_json(s))}};
}

ratio_method parse_method(const std::string &m)
{
    if (m == "auto") {
        return ratio_method::automatic;
    }
    if (m == "closed") {
        return ratio_method::closed_form;
    }
    if (m == "enum") {
        return ratio_method::enumeration;
    }
    throw usage_error("--method must be auto, closed or enum");
}

quotient_mode parse_mode(const std::string &m)
{
    if (m == "group") {
        return quotient_mode::group;
    }
    if (m == "semigroup") {
        return quotient_mode::semigroup;
    }
    throw usage_error("--mode must be group or semigroup");
}

void write_csv(std::ostream &out, const outcome &o)
{
    for (std::size_t i = 0; i < o.csv_header.size(); ++i) {
        out << (i ? "," : "") << o.csv_header[i];
    }
    out << '\n';
    for (const auto &row : o.csv_rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << row[i];
        }
        out << '\n';
    }
}

} // namespace

int dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Finite-horizon experiments on difference sets, ergodic sequences and Folner sequences", "ergodiff"};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);
    app.fallthrough();

    globals g;
    app.add_option("--horizon", g.horizon, "window / scan horizon (command-specific default)");
    app.add_option("--N", g.n, "number of sequence terms (command-specific default)");
    app.add_option("--precision-bits", g.precision_bits,
                   "precision cap in bits for certified floors (default from ERGODIFF_PRECISION_CAP, else 4096)")
        ->capture_default_str()
        ->check(CLI::Range(std::uint64_t{64}, std::uint64_t{1} << 20));
    app.add_option("--theta", g.theta, "positivity threshold for Delta_2 tails")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--output", g.output, "json or csv (csv for tabular reports only)")
        ->capture_default_str()
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--seed", g.seed, "seed for randomized inputs")->capture_default_str();
    app.add_option("--cap", g.cap, "enumeration cap (pairwise products)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);

    context ctx(g);
    std::function<outcome()> run;

    // weyl
    std::string seq = "pow:3/2";
    std::string lambda = "sqrt2-1";
    auto *weyl = app.add_subcommand("weyl", "Weyl sum |(1/N) sum e(lambda [g(n)])| with checkpoint trajectory");
    weyl->add_option("--seq", seq, "sequence spec")->capture_default_str();
    weyl->add_option("--lambda", lambda, "real constant")->capture_default_str();
    weyl->callback([&] {
        run = [&] {
            const auto values = floor_values(sequence_spec::parse(seq), ctx.n(100000), ctx.precision());
            const auto r = weyl_sum(values, real_constant::parse(lambda));
            outcome o{to_json(r)};
            o.csv_header = {"m", "magnitude"};
            for (const auto &c : r.trajectory) {
                o.csv_rows.push_back({std::to_string(c.m), fmt(c.magnitude)});
            }
            return o;
        };
    });

    // residues
    std::uint64_t modulus = 2;
    auto *residues = app.add_subcommand("residues", "residue histogram of [g(n)] mod m");
    residues->add_option("--seq", seq, "sequence spec")->capture_default_str();
    residues->add_option("--m", modulus, "modulus")->capture_default_str()->check(CLI::PositiveNumber);
    residues->callback([&] {
        run = [&] {
            const auto values = floor_values(sequence_spec::parse(seq), ctx.n(1000000), ctx.precision());
            const auto h = residue_distribution(values, modulus);
            outcome o{to_json(h)};
            o.csv_header = {"residue", "count"};
            for (std::size_t r = 0; r < h.counts.size(); ++r) {
                o.csv_rows.push_back({std::to_string(r), std::to_string(h.counts[r])});
            }
            return o;
        };
    });

    // probe
    std::vector<std::string> lambdas;
    std::vector<std::uint64_t> moduli{2, 3, 4, 5};
    auto *probe = app.add_subcommand("probe", "norm-ergodicity probe: Weyl sums and residue equidistribution");
    probe->add_option("--seq", seq, "sequence spec")->capture_default_str();
    probe->add_option("--lambda", lambdas, "irrational probes (default sqrt2-1, (sqrt5-1)/2, pi-3)")
        ->delimiter(',');
    probe->add_option("--moduli", moduli, "residue moduli")->delimiter(',')->capture_default_str();
    probe->callback([&] {
        run = [&] {
            std::vector<real_constant> ls;
            for (const auto &l : lambdas) {
                ls.push_back(real_constant::parse(l));
            }
            if (ls.empty()) {
                ls = default_lambda_probes();
            }
            const auto v = norm_ergodic_probe(sequence_spec::parse(seq), ctx.n(100000), ls, moduli, {}, ctx.precision());
            outcome o{to_json(v)};
            o.indeterminate = v.result == verdict::indeterminate;
            return o;
        };
    });

    // bosh
    std::uint64_t degree = 2;
    std::uint64_t height = 3;
    double grid_min = 1e3;
    double grid_max = 1e6;
    std::size_t grid_points = 8;
    auto *bosh = app.add_subcommand("bosh", "heuristic check that |g(x) - p(x)| grows for small rational polynomials");
    bosh->add_option("--seq", seq, "sequence spec")->capture_default_str();
    bosh->add_option("--degree", degree, "polynomial degree bound")->capture_default_str();
    bosh->add_option("--height", height, "coefficient height bound")->capture_default_str()->check(CLI::PositiveNumber);
    bosh->add_option("--grid-min", grid_min, "smallest grid point")->capture_default_str()->check(CLI::PositiveNumber);
    bosh->add_option("--grid-max", grid_max, "largest grid point")->capture_default_str()->check(CLI::PositiveNumber);
    bosh->add_option("--grid-points", grid_points, "grid size")->capture_default_str()->check(CLI::Range(2, 1000));
    bosh->callback([&] {
        run = [&] {
            const auto r = boshernitzan_probe(sequence_spec::parse(seq), degree, height,
                                              geometric_grid(grid_min, grid_max, grid_points));
            return outcome{to_json(r)};
        };
    });

    // density
    set_args sa;
    std::string family_text = "interval";
    std::optional<std::uint64_t> n_max;
    auto *density = app.add_subcommand("density", "ratios |S ∩ F_n| / |F_n| along an interval family");
    add_set_options(density, sa);
    density->add_option("--family", family_text, "interval family")->capture_default_str();
    density->add_option("--n-max", n_max, "largest family index (default: horizon)");
    density->callback([&] {
        run = [&] {
            const auto s = make_set(ctx, sa, 10000);
            const auto d = windowed_density(s, folner_family::parse(family_text), n_max.value_or(s.horizon()));
            outcome o{to_json(d)};
            o.csv_header = {"n", "ratio"};
            for (std::size_t i = 0; i < d.ratios.size(); ++i) {
                o.csv_rows.push_back({std::to_string(i + 1), fmt(to_double(d.ratios[i]))});
            }
            return o;
        };
    });

    // delta
    int kind = 1;
    std::int64_t shift = 1;
    std::optional<std::uint64_t> family_n_max;
    auto *delta = app.add_subcommand("delta", "Delta_1 / Delta_{2,g} / |S ∩ (S-n)| of a windowed set");
    add_set_options(delta, sa);
    delta->add_option("--kind", kind, "1, 2 or 3")->capture_default_str()->check(CLI::IsMember({1, 2, 3}));
    delta->add_option("--seq", seq, "shift sequence for kind 2")->capture_default_str();
    delta->add_option("--shift", shift, "shift n for kind 3")->capture_default_str();
    delta->add_option("--family", family_text, "interval family for kind 2")->capture_default_str();
    delta->add_option("--family-n-max", family_n_max, "largest family index for kind 2 (default: horizon)");
    delta->add_option("--n-max", n_max, "largest n tested for kind 2 (default: horizon)");
    delta->callback([&] {
        run = [&] {
            const auto s = make_set(ctx, sa, 10000);
            if (kind == 1) {
                return outcome{set_json(delta1(s))};
            }
            if (kind == 3) {
                return outcome{json{{"shift", shift}, {"count", delta3_count(s, shift)}}};
            }
            const auto family = folner_family::parse(family_text);
            delta2_options o;
            o.family = &family;
            o.family_n_max = family_n_max.value_or(s.horizon());
            o.n_max = n_max.value_or(s.horizon());
            o.theta = ctx.theta();
            o.precision = ctx.precision();
            return outcome{set_json(delta2_g(s, sequence_spec::parse(seq), o))};
        };
    });

    // gaps
    auto *gaps = app.add_subcommand("gaps", "max gap, max run and gap histogram of a windowed set");
    add_set_options(gaps, sa);
    gaps->callback([&] {
        run = [&] {
            const auto st = gap_run_stats_of(make_set(ctx, sa, 10000));
            outcome o{to_json(st)};
            o.csv_header = {"gap", "count"};
            for (const auto &[len, count] : st.gap_histogram) {
                o.csv_rows.push_back({std::to_string(len), std::to_string(count)});
            }
            return o;
        };
    });

    // cover
    std::uint64_t target = 100;
    std::uint64_t ell_max = 16;
    bool use_delta1 = false;
    auto *cover = app.add_subcommand("cover", "fewest translates of E covering [-M, M]");
    add_set_options(cover, sa);
    cover->add_option("--target", target, "M in [-M, M]")->capture_default_str();
    cover->add_option("--ell-max", ell_max, "largest cover size searched")->capture_default_str();
    cover->add_flag("--delta1", use_delta1, "cover Delta_1 of the set rather than the set itself");
    cover->callback([&] {
        run = [&] {
            auto e = make_set(ctx, sa, 1000);
            if (use_delta1) {
                e = delta1(e);
            }
            cover_options co;
            co.ell_max = ell_max;
            const auto c = cover_search(e, target, co);
            if (!c) {
                outcome o{json{{"found", false}, {"ell_max", ell_max}}};
                o.indeterminate = true;
                return o;
            }
            auto j = to_json(*c);
            j["found"] = true;
            return outcome{j};
        };
    });

    // example-3-13
    auto *ex313 = app.add_subcommand("example-3-13", "no two consecutive members of D_g, g(n) = 2n + 2 sqrt(n)");
    ex313->callback([&] {
        run = [&] {
            const auto r = verify_example_3_13(ctx.horizon(1000000));
            return outcome{to_json(r)};
        };
    });

    // example-3-14
    std::vector<std::uint64_t> run_lengths{1};
    std::uint64_t bound = 10000000;
    auto *ex314 = app.add_subcommand("example-3-14", "least M starting R+1 consecutive non-members of D_{3/2}");
    ex314->add_option("--run-length", run_lengths, "R values")->delimiter(',')->capture_default_str();
    ex314->add_option("--bound", bound, "search bound for M")->capture_default_str();
    ex314->callback([&] {
        run = [&] {
            outcome o{json::array()};
            for (auto r : run_lengths) {
                const auto res = find_gap_3_14(r, bound);
                o.indeterminate = o.indeterminate || !res.m;
                o.result.push_back(to_json(res));
            }
            o.result = json{{"runs", o.result}};
            return o;
        };
    });

    // defect
    std::string element = "int:1";
    std::uint64_t index = 10;
    auto *defect = app.add_subcommand("defect", "|F_n ∩ g F_n| / |F_n|");
    defect->add_option("--family", family_text, "family")->capture_default_str();
    defect->add_option("--g", element, "element")->capture_default_str();
    defect->add_option("--n", index, "family index")->capture_default_str()->check(CLI::PositiveNumber);
    defect->callback([&] {
        run = [&] {
            const auto family = folner_family::parse(family_text);
            const auto d = folner_defect(family, semigroup_element::parse(element), index, ctx.cap());
            return outcome{json{{"family", family.text()}, {"g", element}, {"n", index}, {"defect", to_json(d)}}};
        };
    });

    // tempered
    std::string c_text = "2";
    std::string mode_text = "group";
    std::string method_text = "auto";
    std::vector<std::string> g_set;
    std::uint64_t scan_max = 10;
    auto *tempered = app.add_subcommand("tempered", "temperedness ratios |∪_{k<n} F_k^{-1} F_n| / |F_n| for 2 <= n <= n-max");
    tempered->add_option("--family", family_text, "family")->capture_default_str();
    tempered->add_option("--n-max", scan_max, "largest index")->capture_default_str()->check(CLI::Range(2, 1000000));
    tempered->add_option("--C", c_text, "candidate constant")->capture_default_str();
    tempered->add_option("--mode", mode_text, "group or semigroup")->capture_default_str();
    tempered->add_option("--g", g_set, "right translates for semigroup mode")->delimiter(';');
    tempered->add_option("--method", method_text, "auto, closed or enum")->capture_default_str();
    tempered->callback([&] {
        run = [&] {
            ratio_options ro;
            ro.mode = parse_mode(mode_text);
            ro.method = parse_method(method_text);
            ro.cap = ctx.cap();
            std::vector<semigroup_element> gs;
            for (const auto &x : g_set) {
                gs.push_back(semigroup_element::parse(x));
            }
            const auto r = temperedness_scan(folner_family::parse(family_text), scan_max, parse_rational(c_text), ro, gs);
            outcome o{to_json(r)};
            o.csv_header = {"n", "quotient_size", "family_size", "ratio", "method"};
            for (const auto &x : r.ratios) {
                o.csv_rows.push_back({std::to_string(x.n), x.quotient_size.get_str(), x.family_size.get_str(),
                                      fmt(to_double(x.ratio)), to_string(x.method)});
            }
            return o;
        };
    });

    // criterion-5-3
    std::string f_text = "n^2";
    auto *crit = app.add_subcommand("criterion-5-3", "n f(n) / f(n+1) and the box ratios for exponent bound f");
    crit->add_option("--f", f_text, "integer expression in n")->capture_default_str();
    crit->add_option("--n-max", scan_max, "largest n")->capture_default_str()->check(CLI::Range(2, 100000));
    crit->callback([&] {
        run = [&] {
            const auto r = criterion_5_3(int_expr::parse(f_text), scan_max);
            outcome o{to_json(r)};
            o.csv_header = {"n", "value"};
            for (std::size_t i = 0; i < r.values.size(); ++i) {
                o.csv_rows.push_back({std::to_string(i + 1), fmt(to_double(r.values[i]))});
            }
            return o;
        };
    });

    // heis-count
    std::uint64_t heis_n = 2;
    auto *heis = app.add_subcommand("heis-count", "exact |F_{n-1}^{-1} F_n| for the Heisenberg box");
    heis->add_option("--n", heis_n, "index")->capture_default_str()->check(CLI::Range(2, 1000));
    heis->callback([&] {
        run = [&] { return outcome{to_json(heisenberg_quotient_count(heis_n, ctx.cap()))}; };
    });

    // ergodic-avg
    std::string system_text = "circle:alpha=sqrt2-1";
    std::string obs_text = "arc:0,1/2";
    std::string x0_text;
    auto *avg = app.add_subcommand("ergodic-avg", "(1/N) sum 1_obs(T^{[g(n)]} x0)");
    avg->add_option("--system", system_text, "rotation system")->capture_default_str();
    avg->add_option("--obs", obs_text, "observable")->capture_default_str();
    avg->add_option("--seq", seq, "sequence spec")->capture_default_str();
    avg->add_option("--x0", x0_text, "start point (default origin)");
    avg->callback([&] {
        run = [&] {
            const auto sys = rotation_system::parse(system_text);
            const auto x0 = x0_text.empty() ? start_point::origin(sys) : start_point::parse(x0_text);
            const auto values = floor_values(sequence_spec::parse(seq), ctx.n(100000), ctx.precision());
            const auto r = orbit_average_report_of(sys, x0, observable::parse(obs_text), values);
            outcome o{to_json(r)};
            o.indeterminate = r.boundary_failures != 0;
            return o;
        };
    });

    // recurrence
    std::string beta_text = "1/2";
    std::string rec_obs;
    auto *rec = app.add_subcommand("recurrence", "(1/N) sum mu(A ∩ T^{[g(n)]} A)");
    rec->add_option("--system", system_text, "rotation system")->capture_default_str();
    rec->add_option("--beta", beta_text, "arc length of A = [0, beta) on a circle")->capture_default_str();
    rec->add_option("--obs", rec_obs, "observable per factor (products, cyclic factors or unions of arcs)");
    rec->add_option("--seq", seq, "sequence spec")->capture_default_str();
    rec->callback([&] {
        run = [&] {
            const auto sys = rotation_system::parse(system_text);
            const auto values = floor_values(sequence_spec::parse(seq), ctx.n(100000), ctx.precision());
            if (!rec_obs.empty()) {
                const double a = product_recurrence(sys, observable::parse(rec_obs), values);
                return outcome{json{{"average", a}, {"N", values.size()}}};
            }
            const auto *circle = std::get_if<circle_system>(&sys.variant());
            if (circle == nullptr) {
                throw usage_error("--beta needs a circle system; use --obs for others");
            }
            auto j = to_json(recurrence_average(*circle, parse_rational(beta_text), values));
            const auto beta = to_double(parse_rational(beta_text));
            j["beta_squared"] = beta * beta;
            return outcome{j};
        };
    });

    if (argc <= 1) {
        err << app.help();
        return 1;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion &) {
        out << tool_version << '\n';
        return 0;
    } catch (const CLI::ParseError &e) {
        err << e.what() << '\n';
        if (!app.get_subcommands().empty()) {
            err << app.get_subcommands().front()->help();
        } else {
            err << app.help();
        }
        return 1;
    }

    const auto *sub = app.get_subcommands().front();
    try {
        outcome o = run();
        json cfg = option_values(*sub);
        cfg["horizon"] = nullptr;
        cfg["N"] = nullptr;
        cfg["precision_bits"] = g.precision_bits;
        cfg["theta"] = g.theta;
        cfg["seed"] = g.seed;
        cfg["cap"] = g.cap;
        cfg["output"] = g.output;
        for (const auto &[k, v] : ctx.resolved().items()) {
            cfg[k] = v;
        }
        if (g.output == "csv") {
            if (o.csv_header.empty()) {
                err << "csv output is only available for tabular reports\n";
                return 1;
            }
            write_csv(out, o);
        } else {
            json report{{"tool", "ergodiff"},
                        {"version", tool_version},
                        {"command", sub->get_name()},
                        {"config", cfg},
                        {"result", o.result}};
            out << report.dump(2) << '\n';
        }
        return o.indeterminate ? 2 : 0;
    } catch (const precision_exhausted &e) {
        err << "indeterminate: " << e.what() << '\n';
        return 2;
    } catch (const enumeration_too_large &e) {
        err << "indeterminate: " << e.what() << '\n';
        return 2;
    } catch (const boundary_ambiguous &e) {
        err << "indeterminate: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace ergodiff::cli

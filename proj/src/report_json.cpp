#include <ergodiff/report_json.hpp>

namespace ergodiff
{

namespace
{

nlohmann::json trajectory_json(const std::vector<checkpoint_magnitude> &t)
{
    auto out = nlohmann::json::array();
    for (const auto &c : t) {
        out.push_back({{"m", c.m}, {"magnitude", c.magnitude}});
    }
    return out;
}

} // namespace

nlohmann::json to_json(const rational &q)
{
    return {{"exact", to_string(q)}, {"approx", to_double(q)}};
}

nlohmann::json to_json(const weyl_sum_report &r)
{
    return {{"lambda", r.lambda}, {"N", r.n}, {"magnitude", r.magnitude}, {"trajectory", trajectory_json(r.trajectory)}};
}

nlohmann::json to_json(const residue_histogram &h)
{
    return {{"modulus", h.modulus}, {"N", h.n}, {"counts", h.counts}, {"max_deviation", h.max_deviation}};
}

nlohmann::json to_json(const norm_ergodic_verdict &v)
{
    auto lam = nlohmann::json::array();
    for (const auto &p : v.irrational_probes) {
        lam.push_back({{"lambda", p.lambda}, {"magnitude", p.magnitude}, {"trajectory", trajectory_json(p.trajectory)}});
    }
    auto res = nlohmann::json::array();
    for (const auto &p : v.residue_probes) {
        res.push_back({{"m", p.m}, {"max_deviation", p.deviation}, {"trajectory", trajectory_json(p.trajectory)}});
    }
    return {{"verdict", to_string(v.result)}, {"reason", v.reason}, {"irrational_probes", lam}, {"residue_probes", res}};
}

nlohmann::json to_json(const boshernitzan_report &r)
{
    auto probes = nlohmann::json::array();
    for (const auto &p : r.probes) {
        auto coeffs = nlohmann::json::array();
        for (const auto &c : p.coeffs) {
            coeffs.push_back(to_string(c));
        }
        probes.push_back({{"coeffs", coeffs}, {"grid", p.grid}, {"ratios", p.ratios}, {"diverges", p.diverges}});
    }
    return {{"degree_bound", r.degree_bound},
            {"height_bound", r.height_bound},
            {"all_diverge", r.all_diverge},
            {"heuristic", r.heuristic},
            {"probes", probes}};
}

nlohmann::json to_json(const density_estimate &d)
{
    std::vector<double> ratios;
    ratios.reserve(d.ratios.size());
    for (const auto &q : d.ratios) {
        ratios.push_back(to_double(q));
    }
    return {{"n_max", d.n_max},
            {"ratios", ratios},
            {"final_ratio", d.ratios.empty() ? nlohmann::json() : to_json(d.ratios.back())},
            {"tail_start", d.tail_start},
            {"tail_max", to_json(d.tail_max)},
            {"tail_min", to_json(d.tail_min)}};
}

nlohmann::json to_json(const gap_run_stats &s)
{
    auto hist = nlohmann::json::array();
    for (const auto &[len, count] : s.gap_histogram) {
        hist.push_back({len, count});
    }
    auto first = nlohmann::json::array();
    for (const auto &[len, pos] : s.first_gap_of_length) {
        first.push_back({len, pos});
    }
    return {{"max_gap", s.max_gap}, {"max_run", s.max_run}, {"gap_histogram", hist}, {"first_gap_of_length", first}};
}

nlohmann::json to_json(const example_3_13_report &r)
{
    return {{"horizon", r.horizon}, {"members", r.members}, {"violations", r.violations.size()},
            {"violation_list", r.violations}};
}

nlohmann::json to_json(const gap_search_result &r)
{
    return {{"run_length", r.run_length},
            {"bound", r.bound},
            {"found", r.m.has_value()},
            {"M", r.m ? nlohmann::json(*r.m) : nlohmann::json()},
            {"verified", r.verified}};
}

nlohmann::json to_json(const cover_certificate &c)
{
    return {{"translates", c.translates},     {"covered_interval", {c.target_lo, c.target_hi}},
            {"ell", c.ell},                   {"greedy_ell", c.greedy_ell},
            {"minimal", c.minimal},           {"verified", c.verified}};
}

nlohmann::json to_json(const ratio_result &r)
{
    return {{"n", r.n},
            {"quotient_size", r.quotient_size.get_str()},
            {"family_size", r.family_size.get_str()},
            {"ratio", to_json(r.ratio)},
            {"method", to_string(r.method)},
            {"nested", r.nested},
            {"bound", r.bound ? to_json(*r.bound) : nlohmann::json()}};
}

nlohmann::json to_json(const temperedness_report &r)
{
    auto ratios = nlohmann::json::array();
    for (const auto &x : r.ratios) {
        ratios.push_back(to_json(x));
    }
    return {{"family", r.family},
            {"mode", to_string(r.mode)},
            {"g_set", r.g_set},
            {"n_max", r.n_max},
            {"C", to_json(r.c_candidate)},
            {"ratios", ratios},
            {"sup", to_json(r.sup)},
            {"sup_index", r.sup_index},
            {"closed_form_bound", r.closed_form_bound ? nlohmann::json(*r.closed_form_bound) : nlohmann::json()},
            {"first_violation", r.first_violation ? nlohmann::json(*r.first_violation) : nlohmann::json()},
            {"verdict", r.first_violation ? "violated" : "bounded by C so far"}};
}

nlohmann::json to_json(const criterion_report &r)
{
    auto values = nlohmann::json::array();
    for (std::size_t i = 0; i < r.values.size(); ++i) {
        values.push_back({{"n", i + 1}, {"value", to_json(r.values[i])}});
    }
    auto boxes = nlohmann::json::array();
    for (std::size_t i = 0; i < r.box_ratios.size(); ++i) {
        boxes.push_back({{"n", i + 2}, {"ratio", to_double(r.box_ratios[i])}});
    }
    return {{"f", r.f},
            {"n_max", r.n_max},
            {"values", values},
            {"box_ratios", boxes},
            {"max", to_json(r.max_value)},
            {"max_index", r.max_index},
            {"trend", r.trend},
            {"exp_bound", r.exp_bound}};
}

nlohmann::json to_json(const heis_count_report &r)
{
    rational ratio(r.count, r.family_size);
    ratio.canonicalize();
    rational bound_ratio(r.bound, r.family_size);
    bound_ratio.canonicalize();
    return {{"n", r.n},
            {"count", r.count.get_str()},
            {"family_size", r.family_size.get_str()},
            {"bound", r.bound.get_str()},
            {"within_bound", r.count <= r.bound},
            {"ratio", to_json(ratio)},
            {"bound_ratio", to_json(bound_ratio)},
            {"pairs", r.pairs}};
}

nlohmann::json to_json(const orbit_average_report &r)
{
    return {{"average", r.average}, {"N", r.n}, {"hits", r.hits}, {"boundary_failures", r.boundary_failures}};
}

nlohmann::json to_json(const recurrence_report &r)
{
    return {{"average", r.average}, {"N", r.n}, {"min_term", r.min_term}, {"max_term", r.max_term}, {"exact", r.exact}};
}

} // namespace ergodiff

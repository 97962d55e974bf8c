#pragma once

#include <ergodiff/density.hpp>
#include <ergodiff/dynamics.hpp>
#include <ergodiff/equidistribution.hpp>
#include <ergodiff/folner.hpp>
#include <ergodiff/numeric.hpp>

#include <json.hpp>

namespace ergodiff
{

// Rationals serialize as {"exact": "p/q", "approx": double}.
nlohmann::json to_json(const rational &q);

nlohmann::json to_json(const weyl_sum_report &r);
nlohmann::json to_json(const residue_histogram &h);
nlohmann::json to_json(const norm_ergodic_verdict &v);
nlohmann::json to_json(const boshernitzan_report &r);

nlohmann::json to_json(const density_estimate &d);
nlohmann::json to_json(const gap_run_stats &s);
nlohmann::json to_json(const example_3_13_report &r);
nlohmann::json to_json(const gap_search_result &r);
nlohmann::json to_json(const cover_certificate &c);

nlohmann::json to_json(const ratio_result &r);
nlohmann::json to_json(const temperedness_report &r);
nlohmann::json to_json(const criterion_report &r);
nlohmann::json to_json(const heis_count_report &r);

nlohmann::json to_json(const orbit_average_report &r);
nlohmann::json to_json(const recurrence_report &r);

} // namespace ergodiff

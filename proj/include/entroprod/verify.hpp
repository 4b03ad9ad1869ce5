// verify.hpp — cross-check suites shared by the CLI and the acceptance binary
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace entroprod::verify {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
    // Clause that cannot hold with the implemented rates; reported, not counted.
    bool known_conflict = false;
};

struct Criterion {
    int id = 0;
    std::string name;
    double time_limit = 0.0;  // seconds, 0 for none
    std::vector<Check> checks;
    double seconds = 0.0;

    bool pass() const;
    // True when every failing check is a known conflict.
    bool only_known_failures() const;
};

Criterion ft_table();
Criterion route_equality();
Criterion swap_engine();
Criterion landauer();
Criterion gaussian_ness();
Criterion classical();
Criterion quench();
Criterion majorization();
Criterion squeezed_bath();
Criterion liouvillian();

// Runs f, records its wall time and appends a runtime check when time_limit > 0.
Criterion timed(const std::function<Criterion()>& f);

std::vector<std::string> suite_names();
// Criteria of a named suite in id order; throws std::invalid_argument for unknown names.
std::vector<Criterion> run_suite(const std::string& suite);

// "PASS  [n] name: detail" summary for a criterion.
std::string summary_line(const Criterion& c);

}  // namespace entroprod::verify

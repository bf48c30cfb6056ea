#pragma once

#include <json.hpp>

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

namespace hyp4 {

using json = nlohmann::ordered_json;

struct Violation {
    json inputs;
    double measured;
    double bound;
    double margin;
};

// margin > 0 means the checked inequality holds; suites whose bounds overflow compare logarithms.
struct VerificationReport {
    std::string suite_id;
    json config = json::object();
    long long trials = 0;
    std::vector<Violation> violations;
    double worst_margin = std::numeric_limits<double>::infinity();
    long long degeneracies = 0;
    long long rejected = 0;
    json details = json::object();
    double wall_time = 0.0;

    bool pass() const { return violations.empty(); }

    void record(const json& inputs, double measured, double bound, double margin) {
        worst_margin = std::min(worst_margin, margin);
        if (!(margin >= 0.0)) violations.push_back({inputs, measured, bound, margin});
    }

    // Deterministic part of the report; wall_time goes to a separate field.
    json to_json(std::size_t max_violations = 50) const {
        json j;
        j["suite_id"] = suite_id;
        j["config"] = config;
        j["trials"] = trials;
        json v = json::array();
        for (std::size_t i = 0; i < violations.size() && i < max_violations; ++i)
            v.push_back({{"inputs", violations[i].inputs},
                         {"measured", violations[i].measured},
                         {"bound", violations[i].bound},
                         {"margin", violations[i].margin}});
        j["violations"] = v;
        j["violation_count"] = violations.size();
        j["worst_margin"] = worst_margin;
        j["degeneracies"] = degeneracies;
        j["rejected"] = rejected;
        j["details"] = details;
        j["pass"] = pass();
        return j;
    }
};

}  // namespace hyp4

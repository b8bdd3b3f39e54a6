#include "cohort_pulse/design.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "cohort_pulse/errors.hpp"

namespace cohort_pulse {

namespace {

DesignMatrix encode_impl(const std::vector<Observation>& obs,
                         const std::vector<std::string>& level_order,
                         const std::optional<std::string>& reference_level) {
    if (obs.empty()) throw EncodeError("no observations to encode");

    std::set<std::string> declared(level_order.begin(), level_order.end());
    std::map<std::string, size_t> level_counts;
    for (const Observation& o : obs) {
        if (!declared.count(o.level))
            throw EncodeError("observation level '" + o.level + "' is not in the declared domain");
        level_counts[o.level] += 1;
    }

    DesignMatrix d;
    d.has_intercept = reference_level.has_value();
    d.reference_level = reference_level;

    std::vector<std::string> present;  // in declared order
    for (const std::string& lvl : level_order) {
        if (level_counts.count(lvl))
            present.push_back(lvl);
        else
            d.dropped_levels.push_back(lvl);
    }
    if (present.size() < 2)
        throw EncodeError("need >= 2 distinct levels with data, found " +
                          std::to_string(present.size()));
    if (reference_level && !level_counts.count(*reference_level))
        throw EncodeError("reference level '" + *reference_level + "' has no observations");

    std::map<std::string, int> col_of;
    if (reference_level) {
        d.column_names.push_back("intercept(" + *reference_level + ")");
        for (const std::string& lvl : present) {
            if (lvl == *reference_level) continue;
            col_of[lvl] = int(d.column_names.size());
            d.column_names.push_back(lvl);
        }
    } else {
        for (const std::string& lvl : present) {
            col_of[lvl] = int(d.column_names.size());
            d.column_names.push_back(lvl);
        }
    }

    std::set<std::string> group_set;
    for (const Observation& o : obs) group_set.insert(o.participant_id);
    d.group_names.assign(group_set.begin(), group_set.end());
    std::map<std::string, int> group_of;
    for (size_t i = 0; i < d.group_names.size(); ++i) group_of[d.group_names[i]] = int(i);

    const Eigen::Index n = Eigen::Index(obs.size());
    const Eigen::Index p = Eigen::Index(d.column_names.size());
    d.y.resize(n);
    d.X = Eigen::MatrixXd::Zero(n, p);
    d.group.resize(obs.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const Observation& o = obs[size_t(i)];
        d.y[i] = o.response;
        if (d.has_intercept) d.X(i, 0) = 1.0;
        auto it = col_of.find(o.level);
        if (it != col_of.end()) d.X(i, it->second) = 1.0;
        d.group[size_t(i)] = group_of[o.participant_id];
    }
    return d;
}

}  // namespace

DesignMatrix encode_design(const std::vector<Observation>& obs,
                           const std::vector<std::string>& level_order,
                           const std::string& reference_level) {
    return encode_impl(obs, level_order, reference_level);
}

DesignMatrix encode_design_no_intercept(const std::vector<Observation>& obs,
                                        const std::vector<std::string>& level_order) {
    return encode_impl(obs, level_order, std::nullopt);
}

}  // namespace cohort_pulse

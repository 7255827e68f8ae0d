#include "mdpalign/multitask.hpp"

#include "mdpalign/errors.hpp"
#include "mdpalign/search.hpp"

#include <algorithm>
#include <iterator>
#include <string>

namespace mdpalign {

namespace {

void check_shared(const TabularMdp& a, const TabularMdp& b, const std::string& field) {
    if (a.transition != b.transition)
        throw InvalidInput(field + " MDPs must share the transition table", field);
    if (a.eta != b.eta) throw InvalidInput(field + " MDPs must share eta", field);
    if (a.gamma != b.gamma) throw InvalidInput(field + " MDPs must share gamma", field);
    if (a.dummy_state != b.dummy_state || a.dummy_action != b.dummy_action)
        throw InvalidInput(field + " MDPs must share dummy state and action", field);
}

} // namespace

void TaskSet::validate() const {
    if (pairs.empty()) throw InvalidInput("task set has no pairs", "x_mdps");
    const auto mode = pairs.front().x.opt.mode;
    for (const auto& p : pairs) {
        check_shared(pairs.front().x.mdp, p.x.mdp, "x_mdps");
        check_shared(pairs.front().y.mdp, p.y.mdp, "y_mdps");
        if (p.x.opt.mode != mode || p.y.opt.mode != mode)
            throw ModeMismatch("task set mixes optimality criteria");
    }
}

TaskSet make_task_set(const std::vector<TabularMdp>& x_mdps, const std::vector<TabularMdp>& y_mdps,
                      CriterionMode mode) {
    if (x_mdps.size() != y_mdps.size())
        throw InvalidInput("x_mdps and y_mdps differ in length", "y_mdps");
    TaskSet ts;
    for (std::size_t i = 0; i < x_mdps.size(); ++i) ts.pairs.push_back({solve(x_mdps[i], mode), solve(y_mdps[i], mode)});
    ts.validate();
    return ts;
}

std::vector<ReductionMap> joint_reductions(const TaskSet& ts, std::optional<double> cap) {
    ts.validate();
    auto joint = enumerate_reductions(ts.pairs.front().x, ts.pairs.front().y, cap);
    for (std::size_t i = 1; i < ts.pairs.size() && !joint.empty(); ++i) {
        const auto next = enumerate_reductions(ts.pairs[i].x, ts.pairs[i].y, cap);
        std::vector<ReductionMap> both;
        std::set_intersection(joint.begin(), joint.end(), next.begin(), next.end(), std::back_inserter(both));
        joint = std::move(both);
    }
    return joint;
}

TransferResult is_transferable(const TaskSet& ts, const TaskPair& target, std::optional<double> cap) {
    TransferResult out;
    const auto joint = joint_reductions(ts, cap);
    out.joint_count = joint.size();
    for (const auto& r : joint) {
        auto report = verify_reduction(target.x.mdp, target.x.opt, target.y.mdp, target.y.opt, r);
        if (!report.empty()) {
            out.transferable = false;
            out.witness = r;
            out.violations = std::move(report);
            break;
        }
    }
    return out;
}

void CdnfExpr::validate(int task_count) const {
    if (minterms.empty()) throw InvalidInput("expression has no minterms", "minterms");
    for (const auto& term : minterms) {
        if (term.empty()) throw InvalidInput("minterm is empty", "minterms");
        for (int i : term)
            if (i < 1 || i > task_count)
                throw InvalidInput("task index " + std::to_string(i) + " outside 1.." + std::to_string(task_count),
                                   "minterms");
    }
}

bool CdnfExpr::evaluate(const std::vector<bool>& literals) const {
    return std::any_of(minterms.begin(), minterms.end(), [&](const std::vector<int>& term) {
        return std::all_of(term.begin(), term.end(), [&](int i) { return literals[i - 1]; });
    });
}

namespace {

OptimalityModel compose_side(const std::vector<const OptimalityModel*>& models, const CdnfExpr& b) {
    const int n = models.front()->state_count();
    const int m = models.front()->action_count();
    Table<char> optimal(n, m, 0);
    std::vector<bool> literals(models.size());
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) {
            for (std::size_t i = 0; i < models.size(); ++i) literals[i] = models[i]->O(s, a);
            optimal(s, a) = b.evaluate(literals) ? 1 : 0;
        }
    return external_optimality(std::move(optimal), models.front()->mode);
}

} // namespace

std::pair<OptimalityModel, OptimalityModel> compose_cdnf(const TaskSet& ts, const CdnfExpr& b) {
    ts.validate();
    b.validate(static_cast<int>(ts.pairs.size()));
    std::vector<const OptimalityModel*> xs, ys;
    for (const auto& p : ts.pairs) {
        xs.push_back(&p.x.opt);
        ys.push_back(&p.y.opt);
    }
    return {compose_side(xs, b), compose_side(ys, b)};
}

TaskPair cdnf_target(const TaskSet& ts, const CdnfExpr& b) {
    auto [ox, oy] = compose_cdnf(ts, b);
    return {{ts.pairs.front().x.mdp, std::move(ox)}, {ts.pairs.front().y.mdp, std::move(oy)}};
}

} // namespace mdpalign

#include "mdpalign/search.hpp"

#include "mdpalign/chain.hpp"
#include "mdpalign/errors.hpp"
#include "mdpalign/rng.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace mdpalign {

void PlantSpec::validate() const {
    if (base_states < 1) throw InvalidInput("base_states must be positive", "base_states");
    if (base_actions < 1) throw InvalidInput("base_actions must be positive", "base_actions");
    if (split_factor_states < 1)
        throw InvalidInput("split_factor_states must be at least 1", "split_factor_states");
    if (split_factor_actions < 1)
        throw InvalidInput("split_factor_actions must be at least 1", "split_factor_actions");
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput("gamma must lie in (0, 1)", "gamma");
}

namespace {

constexpr int kMaxAttempts = 10000;

TabularMdp random_base(const PlantSpec& spec, Rng& rng) {
    const int n = spec.base_states;
    const int m = spec.base_actions;
    Table<StateId> transition(n, m);
    Table<double> reward(n, m);
    for (int s = 0; s < n; ++s)
        for (int a = 0; a < m; ++a) {
            transition(s, a) = rng.below(n);
            reward(s, a) = rng.uniform();
        }
    return make_mdp(std::move(transition), std::move(reward),
                    std::vector<double>(n, 1.0 / n), spec.gamma);
}

struct Split {
    TabularMdp mx;
    ReductionMap planted;
};

Split split_mdp(const TabularMdp& my, const PlantSpec& spec, Rng& rng) {
    const int ks = spec.split_factor_states;
    const int ka = spec.split_factor_actions;
    const int ny = my.state_count();
    const int nay = my.action_count();
    const int nx = ny * ks;
    const int nax = nay * ka;

    Split out;
    auto& mx = out.mx;
    mx.transition = Table<StateId>(nx, nax);
    mx.reward = Table<double>(nx, nax);
    mx.eta.assign(nx, 1.0 / nx);
    mx.gamma = my.gamma;
    for (int sy = 0; sy < ny; ++sy)
        for (int c = 0; c < ks; ++c) mx.state_labels.push_back(my.state_labels[sy] + "." + std::to_string(c));
    for (int ay = 0; ay < nay; ++ay)
        for (int d = 0; d < ka; ++d) mx.action_labels.push_back(my.action_labels[ay] + "." + std::to_string(d));

    // Copy c of s_y under copy d of a_y lands on copy perm[c] of P_y(s_y, a_y).
    std::vector<int> perm(ks);
    for (int sy = 0; sy < ny; ++sy)
        for (int ay = 0; ay < nay; ++ay)
            for (int d = 0; d < ka; ++d) {
                std::iota(perm.begin(), perm.end(), 0);
                rng.shuffle(perm);
                for (int c = 0; c < ks; ++c) {
                    const int sx = sy * ks + c;
                    const int ax = ay * ka + d;
                    mx.transition(sx, ax) = my.next(sy, ay) * ks + perm[c];
                    mx.reward(sx, ax) = my.reward(sy, ay);
                }
            }

    out.planted.phi.resize(nx);
    for (int sx = 0; sx < nx; ++sx) out.planted.phi[sx] = sx / ks;
    out.planted.psi.resize(nax);
    for (int ax = 0; ax < nax; ++ax) out.planted.psi[ax] = ax / ka;
    return out;
}

void relabel(Split& split, Rng& rng) {
    auto& mx = split.mx;
    const int n = mx.state_count();
    const int m = mx.action_count();
    std::vector<int> sp(n), ap(m);  // old index -> new index
    std::iota(sp.begin(), sp.end(), 0);
    std::iota(ap.begin(), ap.end(), 0);
    rng.shuffle(sp);
    rng.shuffle(ap);

    TabularMdp out;
    out.state_labels.resize(n);
    out.action_labels.resize(m);
    out.transition = Table<StateId>(n, m);
    out.reward = Table<double>(n, m);
    out.eta.resize(n);
    out.gamma = mx.gamma;
    for (int s = 0; s < n; ++s) {
        out.state_labels[sp[s]] = mx.state_labels[s];
        out.eta[sp[s]] = mx.eta[s];
        for (int a = 0; a < m; ++a) {
            out.transition(sp[s], ap[a]) = sp[mx.next(s, a)];
            out.reward(sp[s], ap[a]) = mx.reward(s, a);
        }
    }
    for (int a = 0; a < m; ++a) out.action_labels[ap[a]] = mx.action_labels[a];

    ReductionMap r;
    r.phi.resize(n);
    r.psi.resize(m);
    for (int s = 0; s < n; ++s) r.phi[sp[s]] = split.planted.phi[s];
    for (int a = 0; a < m; ++a) r.psi[ap[a]] = split.planted.psi[a];
    split.mx = std::move(out);
    split.planted = std::move(r);
}

bool adapted_chain_unichain(const SolvedMdp& x, const SolvedMdp& y, const ReductionMap& r) {
    const auto g = inverse_action_map(r.psi, x.mdp.action_count(), y.opt);
    const auto pi_x = adapt_policy(covering_policy(y.opt), {r.phi, g}, x.mdp.action_count());
    return validate_chain(x.mdp, pi_x).unichain();
}

} // namespace

PlantedPair generate_planted(const PlantSpec& spec) {
    spec.validate();
    Rng rng(spec.rng_seed, 0x706c616e74ULL);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        auto my = random_base(spec, rng);
        auto y = solve(my, spec.mode);
        if (!validate_chain(y.mdp, covering_policy(y.opt)).unichain()) continue;

        auto split = split_mdp(y.mdp, spec, rng);
        if (spec.permute) relabel(split, rng);
        split.mx.validate();
        auto x = solve(split.mx, spec.mode);
        if (!verify_reduction(x, y, split.planted).empty()) continue;
        if (!adapted_chain_unichain(x, y, split.planted)) continue;
        return {std::move(split.mx), std::move(y.mdp), std::move(split.planted)};
    }
    throw PreconditionFailed("no planted pair found within " + std::to_string(kMaxAttempts) +
                             " attempts for this specification");
}

} // namespace mdpalign

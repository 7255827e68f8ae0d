#include "mdpalign/search.hpp"

#include "mdpalign/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace mdpalign {

double enumeration_cap() {
    if (const char* env = std::getenv("MDPALIGN_CAP")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(v > 0.0))
            throw InvalidInput("MDPALIGN_CAP must be a positive number", "MDPALIGN_CAP");
        return v;
    }
    return kDefaultEnumerationCap;
}

namespace {

class ReductionEnumerator {
public:
    ReductionEnumerator(const TabularMdp& mx, const OptimalityModel& ox, const TabularMdp& my,
                        const OptimalityModel& oy)
        : mx_(mx), ox_(ox), my_(my), oy_(oy), nx_(mx.state_count()), mx_a_(mx.action_count()),
          ny_(my.state_count()), my_a_(my.action_count()) {
        relevant_.assign(my_a_, 0);
        for (StateId s = 0; s < ny_; ++s)
            for (ActionId a = 0; a < my_a_; ++a)
                if (oy_.O(s, a)) relevant_[a] = 1;
    }

    std::vector<ReductionMap> run() {
        std::vector<ActionId> psi(mx_a_, 0);
        for (;;) {
            if (psi_covers_relevant(psi)) {
                r_.psi = psi;
                r_.phi.assign(nx_, -1);
                compute_allowed();
                assign(0);
            }
            // Next psi in lexicographic order.
            int i = mx_a_ - 1;
            while (i >= 0 && psi[i] == my_a_ - 1) psi[i--] = 0;
            if (i < 0) break;
            ++psi[i];
        }
        std::sort(out_.begin(), out_.end());
        return std::move(out_);
    }

private:
    bool psi_covers_relevant(const std::vector<ActionId>& psi) const {
        std::vector<char> hit(my_a_, 0);
        for (ActionId a : psi) hit[a] = 1;
        for (ActionId a = 0; a < my_a_; ++a)
            if (relevant_[a] && !hit[a]) return false;
        return true;
    }

    // Optimality preservation is local to a state once psi is fixed.
    void compute_allowed() {
        allowed_.assign(static_cast<std::size_t>(nx_) * ny_, 0);
        for (StateId sx = 0; sx < nx_; ++sx)
            for (StateId sy = 0; sy < ny_; ++sy) {
                bool ok = true;
                for (ActionId ax = 0; ax < mx_a_ && ok; ++ax)
                    if (oy_.O(sy, r_.psi[ax]) && !ox_.O(sx, ax)) ok = false;
                allowed_[sx * ny_ + sy] = ok;
            }
    }

    // Dynamics preservation on every edge whose endpoints are both assigned and touch `sx`.
    bool consistent(StateId sx) const {
        for (StateId u = 0; u <= sx; ++u) {
            const StateId sy = r_.phi[u];
            for (ActionId ax = 0; ax < mx_a_; ++ax) {
                const ActionId ay = r_.psi[ax];
                if (!oy_.O(sy, ay)) continue;
                const StateId t = mx_.next(u, ax);
                if (t > sx) continue;
                if (u != sx && t != sx) continue;
                if (r_.phi[t] != my_.next(sy, ay)) return false;
            }
        }
        return true;
    }

    void assign(StateId sx) {
        if (sx == nx_) {
            if (verify_reduction(mx_, ox_, my_, oy_, r_).empty()) out_.push_back(r_);
            return;
        }
        for (StateId sy = 0; sy < ny_; ++sy) {
            if (!allowed_[sx * ny_ + sy]) continue;
            r_.phi[sx] = sy;
            if (consistent(sx)) assign(sx + 1);
        }
        r_.phi[sx] = -1;
    }

    const TabularMdp& mx_;
    const OptimalityModel& ox_;
    const TabularMdp& my_;
    const OptimalityModel& oy_;
    int nx_, mx_a_, ny_, my_a_;
    std::vector<char> relevant_;
    std::vector<char> allowed_;
    ReductionMap r_;
    std::vector<ReductionMap> out_;
};

} // namespace

std::vector<ReductionMap> enumerate_reductions(const TabularMdp& mx, const OptimalityModel& ox,
                                               const TabularMdp& my, const OptimalityModel& oy,
                                               std::optional<double> cap) {
    if (ox.mode != oy.mode) throw ModeMismatch("optimality models were solved under different criteria");
    const double limit = cap ? *cap : enumeration_cap();
    const double candidates = std::pow(static_cast<double>(my.state_count()), mx.state_count()) *
                              std::pow(static_cast<double>(my.action_count()), mx.action_count());
    if (candidates > limit)
        throw CapExceeded("enumeration space of " + std::to_string(candidates) +
                          " candidates exceeds the cap of " + std::to_string(limit));
    return ReductionEnumerator(mx, ox, my, oy).run();
}

} // namespace mdpalign

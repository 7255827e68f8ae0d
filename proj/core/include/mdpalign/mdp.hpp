#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mdpalign {

using StateId = int;
using ActionId = int;

/// Row-major [state][action] table.
template <typename T>
class Table {
public:
    Table() = default;
    Table(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    const std::vector<T>& data() const noexcept { return data_; }

    friend bool operator==(const Table&, const Table&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Finite MDP with deterministic dynamics and a discounted objective.
struct TabularMdp {
    std::vector<std::string> state_labels;
    std::vector<std::string> action_labels;
    Table<StateId> transition;  // [s][a] -> s'
    Table<double> reward;       // [s][a]
    std::vector<double> eta;    // initial distribution
    double gamma = 0.95;
    std::optional<StateId> dummy_state;
    std::optional<ActionId> dummy_action;

    int state_count() const noexcept { return static_cast<int>(transition.rows()); }
    int action_count() const noexcept { return static_cast<int>(transition.cols()); }

    StateId next(StateId s, ActionId a) const { return transition(s, a); }

    /// Throws InvalidInput naming the offending field.
    void validate() const;

    friend bool operator==(const TabularMdp&, const TabularMdp&) = default;
};

/// Builds an MDP with default labels ("s0", "a0", ...) and validates it.
TabularMdp make_mdp(Table<StateId> transition, Table<double> reward,
                    std::vector<double> eta, double gamma = 0.95);

/// Stochastic policy, one distribution over actions per state.
struct TabularPolicy {
    Table<double> probs;  // [s][a]

    int state_count() const noexcept { return static_cast<int>(probs.rows()); }
    int action_count() const noexcept { return static_cast<int>(probs.cols()); }

    void validate() const;

    friend bool operator==(const TabularPolicy&, const TabularPolicy&) = default;
};

TabularPolicy uniform_policy(int states, int actions);
TabularPolicy deterministic_policy(std::span<const ActionId> choice, int actions);

/// Appends an absorbing dummy state s^d and a dummy action a^d that leads to it.
/// Every pair touching a dummy pays min_reward - 1, so neither is ever optimal
/// on the recurrent part of the chain. Rejects an MDP that already has dummies.
TabularMdp augment_with_dummies(const TabularMdp& mdp);

/// States of a map's domain grouped by image: result[y] = sorted { x : map[x] == y }.
std::vector<std::vector<int>> preimages(std::span<const int> map, int codomain_size);

} // namespace mdpalign

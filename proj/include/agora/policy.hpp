#pragma once

#include "agora/config.hpp"

#include <span>
#include <vector>

namespace agora {

/// Row-stochastic table p(s, a) for tabular direct policy search.
class PolicyTable {
public:
    PolicyTable() = default;
    /// Uniform rows.
    PolicyTable(int n_states, int n_actions);
    /// Adopts stored probabilities as they are (row-major). Throws on a size
    /// mismatch or a negative or non-finite entry.
    static PolicyTable from_data(int n_states, int n_actions, std::vector<double> probs);

    int states() const { return states_; }
    int actions() const { return actions_; }

    double at(int s, int a) const { return p_[index(s, a)]; }
    std::span<const double> row(int s) const;
    std::span<const double> data() const { return p_; }

    /// Replaces a row; the input is normalised. Throws on negative entries or zero mass.
    void set_row(int s, std::span<const double> probs);

    /// Categorical draw from row `s`.
    int sample(int s, RngStream& rng) const;

    /// p(s,a) += step (1 - p(s,a)); every other entry of the row scales by (1 - step).
    void reinforce(int s, int a, double step);
    /// p(s,a) scales by (1 - step), then the row is renormalised.
    void penalize(int s, int a, double step);

    /// Largest |row sum - 1| over all rows.
    double max_row_error() const;
    double min_entry() const;

    bool operator==(const PolicyTable&) const = default;

private:
    std::size_t index(int s, int a) const {
        return static_cast<std::size_t>(s) * static_cast<std::size_t>(actions_) + static_cast<std::size_t>(a);
    }
    void renormalize(int s);

    int states_ = 0;
    int actions_ = 0;
    std::vector<double> p_;
};

/// Combined update used by both learners. The step is learn_rate * |reward| / 4.
/// A positive reward reinforces the hindsight-best action; a negative one
/// penalises the action actually taken, unless it was already the hindsight
/// best, in which case the best action is still reinforced.
void hindsight_update(PolicyTable& policy, int state, int best_action, int taken_action, int reward,
                      double learn_rate);

}  // namespace agora

#include "agora/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace agora {

PolicyTable::PolicyTable(int n_states, int n_actions)
    : states_(n_states),
      actions_(n_actions),
      p_(static_cast<std::size_t>(n_states) * static_cast<std::size_t>(n_actions), 1.0 / n_actions) {
    if (n_states <= 0 || n_actions <= 0) {
        throw std::invalid_argument("policy table dimensions must be positive");
    }
}

PolicyTable PolicyTable::from_data(int n_states, int n_actions, std::vector<double> probs) {
    PolicyTable t(n_states, n_actions);
    if (probs.size() != t.p_.size()) {
        throw std::invalid_argument("policy data does not match the table dimensions");
    }
    for (double x : probs) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw std::invalid_argument("policy probabilities must be finite and non-negative");
        }
    }
    t.p_ = std::move(probs);
    return t;
}

std::span<const double> PolicyTable::row(int s) const {
    return std::span<const double>(p_).subspan(index(s, 0), static_cast<std::size_t>(actions_));
}

void PolicyTable::set_row(int s, std::span<const double> probs) {
    if (static_cast<int>(probs.size()) != actions_) {
        throw std::invalid_argument("row length does not match the action count");
    }
    double total = 0.0;
    for (double x : probs) {
        if (!(x >= 0.0) || !std::isfinite(x)) {
            throw std::invalid_argument("policy probabilities must be finite and non-negative");
        }
        total += x;
    }
    if (total <= 0.0) {
        throw std::invalid_argument("policy row has no mass");
    }
    for (int a = 0; a < actions_; ++a) {
        p_[index(s, a)] = probs[static_cast<std::size_t>(a)] / total;
    }
}

int PolicyTable::sample(int s, RngStream& rng) const {
    const double u = rng.uniform();
    double cumulative = 0.0;
    int last_positive = 0;
    for (int a = 0; a < actions_; ++a) {
        const double p = p_[index(s, a)];
        if (p > 0.0) {
            last_positive = a;
            cumulative += p;
            if (u < cumulative) {
                return a;
            }
        }
    }
    return last_positive;
}

void PolicyTable::reinforce(int s, int a, double step) {
    step = std::clamp(step, 0.0, 1.0);
    if (step == 0.0) {
        return;
    }
    for (int k = 0; k < actions_; ++k) {
        double& p = p_[index(s, k)];
        p = k == a ? p + step * (1.0 - p) : p * (1.0 - step);
    }
    renormalize(s);
}

void PolicyTable::penalize(int s, int a, double step) {
    step = std::clamp(step, 0.0, 1.0);
    if (step == 0.0) {
        return;
    }
    double& p = p_[index(s, a)];
    const double remaining = 1.0 - p;
    if (remaining <= 0.0) {
        // the whole row sits on `a`; scaling it alone would leave no mass to renormalise
        return;
    }
    p *= (1.0 - step);
    renormalize(s);
}

void PolicyTable::renormalize(int s) {
    const auto begin = p_.begin() + static_cast<std::ptrdiff_t>(index(s, 0));
    const auto end = begin + actions_;
    const double total = std::accumulate(begin, end, 0.0);
    for (auto it = begin; it != end; ++it) {
        *it /= total;
    }
}

double PolicyTable::max_row_error() const {
    double worst = 0.0;
    for (int s = 0; s < states_; ++s) {
        const auto r = row(s);
        worst = std::max(worst, std::abs(std::accumulate(r.begin(), r.end(), 0.0) - 1.0));
    }
    return worst;
}

double PolicyTable::min_entry() const { return p_.empty() ? 0.0 : *std::min_element(p_.begin(), p_.end()); }

void hindsight_update(PolicyTable& policy, int state, int best_action, int taken_action, int reward,
                      double learn_rate) {
    const double step = learn_rate * std::abs(reward) / 4.0;
    if (reward > 0 || taken_action == best_action) {
        policy.reinforce(state, best_action, step);
    } else {
        policy.penalize(state, taken_action, step);
    }
}

}  // namespace agora

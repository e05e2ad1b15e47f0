#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace agora {

/// Bounded FIFO of the most recent values.
class History {
public:
    explicit History(std::size_t capacity = 0) : capacity_(capacity) {}

    void push(double x) {
        if (capacity_ == 0) {
            return;
        }
        if (values_.size() == capacity_) {
            values_.pop_front();
        }
        values_.push_back(x);
    }
    void clear() { values_.clear(); }
    std::size_t size() const { return values_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return values_.empty(); }
    double back() const { return values_.back(); }
    const std::deque<double>& values() const { return values_; }

private:
    std::size_t capacity_;
    std::deque<double> values_;
};

double mean(std::span<const double> xs);
/// Sample (n-1) standard deviation; 0 for fewer than two values.
double sample_std(std::span<const double> xs);

/// Linear-interpolation quantile (numpy "linear"). Reorders `scratch`.
double quantile_inplace(std::vector<double>& scratch, double prob);

/// 0 below the 1/3 quantile of `history`, 2 above the 2/3 quantile, 1 otherwise
/// (including an empty history).
int tercile(double value, std::span<const double> history);
int tercile(double value, const History& history);

/// value >= median(history); false for an empty history.
bool at_or_above_median(double value, const History& history);

/// Sextile reward on {-4,-2,-1,1,2,4} for an observation that beats `beaten`
/// of `total` reference values: bin k = floor(6 * beaten / total) maps to
/// {-4,-2,-1,1,2,4}[k], so beating everything earns +4. Bins are half-open on
/// the right except the last. `total` must be positive.
int sextile_reward(std::size_t beaten, std::size_t total);

std::size_t count_below(double value, const History& history);
std::size_t count_above(double value, const History& history);

}  // namespace agora

#pragma once

#include <vector>

#include "neseek/types.hpp"

namespace neseek {

/// Logged samples of an integration run over the flat flow state [X; K].
/// x_dim + gain_dim equals the state length; gain_dim is zero for
/// non-adaptive flows.
struct TrajectoryLog {
    std::vector<double> times;
    std::vector<Vec> states;
    int x_dim = 0;
    int gain_dim = 0;

    std::size_t size() const { return times.size(); }
    Vec x_at(std::size_t row) const { return states.at(row).head(x_dim); }
    Vec gains_at(std::size_t row) const { return states.at(row).tail(gain_dim); }
};

} // namespace neseek

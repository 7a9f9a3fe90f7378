#pragma once

#include "wipmf/bandit.hpp"

#include <vector>

namespace wipmf {

struct ChannelClass {
    double p = 0.0; // good -> good
    double r = 0.0; // bad -> good
};

void check_channel_class(const ChannelClass& c);

// Probability of the good state t >= 1 steps after observing s.
double belief(const ChannelClass& c, int s, int t);
double channel_index(const ChannelClass& c, int s, int t);

struct ChannelInstance {
    std::vector<ChannelClass> classes;
    double beta = 0.5; // mass of class 1 when there are two classes
    double alpha = 0.3;
    int t_star = 40;

    std::vector<double> class_weights() const;
};

struct ChannelState {
    int k = 0; // 0-based class
    int s = 0;
    int t = 1;
};

// Product model over (k, s, t <= t_star); state id = k*2*t_star + s*t_star + (t-1).
struct ChannelModel {
    BanditModel model;
    std::vector<ChannelState> states;
    Vector indices;
    std::vector<int> order; // decreasing index, ties by ascending id
    int state_id(int k, int s, int t) const;
    int t_star = 0;
};

ChannelModel build_channel_model(const ChannelInstance& inst);

struct ChannelFixedPoint {
    Vector m_star;          // model state order
    ChannelState threshold; // state randomized at the fixed point
    double theta = 0.0;     // activated fraction of the threshold state
    double boundary_gap = 0.0;
    bool singular = false;
    double residual = 0.0; // |phi(m*) - m*| under the generic presorted map
    double rel1 = 0.0;     // rho(m*)
};

ChannelFixedPoint channel_fixed_point(const ChannelInstance& inst, const ChannelModel& cm);

} // namespace wipmf

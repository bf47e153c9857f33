#include "netsim/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace netsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void InputSchedule::insert(const InputTrajectory& traj) {
    for (const auto& t : trajs_)
        if (t.seq == traj.seq) return;  // duplicate delivery
    auto pos = std::upper_bound(trajs_.begin(), trajs_.end(), traj,
                                [](const InputTrajectory& a, const InputTrajectory& b) {
                                    if (a.start_time != b.start_time)
                                        return a.start_time < b.start_time;
                                    return a.seq < b.seq;
                                });
    trajs_.insert(pos, traj);
}

double InputSchedule::lookup(double t) const {
    // Newest trajectory that has started: last element with start_time <= t.
    const InputTrajectory* active = nullptr;
    for (const auto& traj : trajs_) {
        if (traj.start_time <= t)
            active = &traj;
        else
            break;
    }
    if (!active) return initial_input_;
    const auto n = static_cast<long>(active->samples.size());
    if (n == 0) return initial_input_;
    long idx = static_cast<long>(std::floor((t - active->start_time) / active->dt));
    if (idx >= n) {
        return policy_ == ExpiredPolicy::HoldLast ? active->samples.back() : 0.0;
    }
    idx = std::max(idx, 0L);
    return active->samples[static_cast<size_t>(idx)];
}

double InputSchedule::next_breakpoint(double t) const {
    double best = kInf;
    const InputTrajectory* active = nullptr;
    for (const auto& traj : trajs_) {
        if (traj.start_time <= t) {
            active = &traj;
        } else {
            best = std::min(best, traj.start_time);
            break;  // sorted: later trajectories start even later
        }
    }
    if (active && !active->samples.empty()) {
        const auto n = static_cast<long>(active->samples.size());
        long idx = static_cast<long>(std::floor((t - active->start_time) / active->dt));
        idx = std::max(idx, 0L);
        if (idx < n) {
            double bp = active->start_time + active->dt * double(idx + 1);
            while (bp <= t && idx < n) bp = active->start_time + active->dt * double(++idx + 1);
            if (idx < n && bp > t) best = std::min(best, bp);
        }
    }
    return best;
}

double InputSchedule::newest_end_time() const {
    if (trajs_.empty()) return -kInf;
    return trajs_.back().end_time();
}

State4 integrate_over_schedule(State4 x, double t0, double t1,
                               const InputSchedule& schedule,
                               const PendulumParams& params, double tick,
                               const std::function<void(double, const State4&)>* on_tick) {
    if (t1 < t0) throw std::runtime_error("integrate_over_schedule: t1 < t0");
    double t = t0;
    // Next absolute tick-grid point strictly greater than t.
    auto next_tick = [tick](double tc) {
        long long i = static_cast<long long>(std::floor(tc / tick)) + 1;
        double bp = double(i) * tick;
        while (bp <= tc) bp = double(++i) * tick;
        return bp;
    };
    while (t < t1) {
        double t_next = std::min(t1, std::min(next_tick(t), schedule.next_breakpoint(t)));
        const double u = schedule.lookup(t);
        x = integrate_step(x, u, t_next - t, params);
        t = t_next;
        if (on_tick) {
            // Report when we land exactly on a tick-grid point.
            const double near = std::round(t / tick) * tick;
            if (near == t) (*on_tick)(t, x);
        }
    }
    return x;
}

State4 predict_state(const State4& x_from, double t_from, double t_to,
                     const InputSchedule& schedule, const PendulumParams& params) {
    if (t_to < t_from) throw std::runtime_error("predict_state: t_to < t_from");
    if (t_to == t_from) return x_from;
    State4 x = integrate_over_schedule(x_from, t_from, t_to, schedule, params);
    if (!x.finite()) throw std::runtime_error("predict_state: non-finite state");
    return x;
}

}  // namespace netsim

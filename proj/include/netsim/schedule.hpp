#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "netsim/pendulum.hpp"

namespace netsim {

/// A timed segment of zero-order-hold input samples, answering the state
/// measured at origin_stamp and applied from start_time onward.
struct InputTrajectory {
    double origin_stamp = 0.0;   // t_k of the state measurement it answers (s)
    double start_time = 0.0;     // application start, t_k + tau_rtt (s)
    double dt = 0.02;            // hold interval per sample (s)
    std::vector<double> samples; // voltages
    uint32_t seq = 0;

    double end_time() const { return start_time + dt * double(samples.size()); }
};

enum class ExpiredPolicy { HoldLast, Zero };

/// Ordered buffer of input trajectories. Newer trajectories override older
/// ones from their start_time onward; before the first start the initial
/// input (zero by default) applies. lookup() is total for t >= 0.
class InputSchedule {
public:
    InputSchedule() = default;
    InputSchedule(double initial_input, ExpiredPolicy policy)
        : initial_input_(initial_input), policy_(policy) {}

    /// Inserts keeping (start_time, seq) order; duplicate seq is a no-op.
    void insert(const InputTrajectory& traj);

    /// ZOH sample at time t of the newest trajectory that has started.
    double lookup(double t) const;

    /// Smallest time > t at which lookup() may change value
    /// (+inf when the input is constant from t on).
    double next_breakpoint(double t) const;

    /// End time of the newest trajectory (-inf when empty).
    double newest_end_time() const;

    bool empty() const { return trajs_.empty(); }
    size_t size() const { return trajs_.size(); }
    const std::vector<InputTrajectory>& trajectories() const { return trajs_; }
    double initial_input() const { return initial_input_; }

private:
    std::vector<InputTrajectory> trajs_;  // sorted by (start_time, seq)
    double initial_input_ = 0.0;
    ExpiredPolicy policy_ = ExpiredPolicy::HoldLast;
};

/// Integrates the plant from t0 to t1 under schedule inputs with the shared
/// stepping rule: steps land exactly on every schedule breakpoint and on
/// every absolute tick-grid point (i * tick). Plant, sensor predictor and
/// controller predictor all use this routine so nominal predictions match
/// the plant bit for bit. on_tick, when given, is called at each tick-grid
/// crossing with (t, state).
State4 integrate_over_schedule(State4 x, double t0, double t1,
                               const InputSchedule& schedule,
                               const PendulumParams& params,
                               double tick = 1e-3,
                               const std::function<void(double, const State4&)>* on_tick = nullptr);

/// Forward prediction of Eq-style delay compensation: integrates the model
/// from (x_from, t_from) to t_to using the scheduled inputs.
State4 predict_state(const State4& x_from, double t_from, double t_to,
                     const InputSchedule& schedule, const PendulumParams& params);

}  // namespace netsim

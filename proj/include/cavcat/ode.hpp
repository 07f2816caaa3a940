#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "cavcat/errors.hpp"

namespace cavcat {

struct AdaptiveOptions {
    double rtol = 1e-8;
    double atol = 1e-8;
    double initial_step = 0.0; // 0: chosen from the first derivative
    double max_step = std::numeric_limits<double>::infinity();
    long max_steps = 100'000'000;
};

// Dormand-Prince 5(4) with FSAL and step-size control on the max-norm of the
// embedded error estimate. State is any Eigen dense type; Rhs is callable as
// State(double t, const State& y).
template <typename State, typename Rhs>
class DormandPrince {
public:
    DormandPrince(Rhs rhs, AdaptiveOptions options)
        : rhs_(std::move(rhs)), options_(options)
    {
    }

    // Advances y from t to t_end exactly (the last step is shortened).
    void advance(State& y, double& t, double t_end)
    {
        if (t_end == t)
            return;
        if (!(t_end > t))
            throw InvalidArgument("integration only runs forward in time");

        if (!have_k1_ || k1_time_ != t) {
            k1_ = rhs_(t, y);
            k1_time_ = t;
            have_k1_ = true;
        }
        if (h_ <= 0.0)
            h_ = initial_step(y, t_end - t);

        while (t < t_end) {
            if (++steps_ > options_.max_steps)
                throw StiffnessError("step budget exhausted");
            double h = std::min({h_, options_.max_step, t_end - t});
            const bool last = (h == t_end - t);
            const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
            if (h < floor) {
                std::ostringstream msg;
                msg << "step size underflow at t=" << t << " (h=" << h
                    << "); loosen the tolerance or integrate in an interaction picture";
                throw StiffnessError(msg.str());
            }

            const State k2 = rhs_(t + c2 * h, State(y + h * (a21 * k1_)));
            const State k3 = rhs_(t + c3 * h, State(y + h * (a31 * k1_ + a32 * k2)));
            const State k4 = rhs_(t + c4 * h, State(y + h * (a41 * k1_ + a42 * k2 + a43 * k3)));
            const State k5 =
                rhs_(t + c5 * h, State(y + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4)));
            const State k6 = rhs_(
                t + h, State(y + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
            State y_new = y + h * (b1 * k1_ + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const double t_new = last ? t_end : t + h;
            State k7 = rhs_(t_new, y_new);
            const State err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

            const auto scale =
                (options_.atol + options_.rtol * y.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array());
            const double err_norm = (err.cwiseAbs().array() / scale).maxCoeff();

            if (err_norm <= 1.0) {
                y = std::move(y_new);
                t = t_new;
                k1_ = std::move(k7);
                k1_time_ = t;
                ++accepted_;
                const double factor = err_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0);
                // A shortened final step says nothing about the natural step size.
                if (!last || factor < 1.0)
                    h_ = h * factor;
            } else {
                ++rejected_;
                h_ = h * std::clamp(0.9 * std::pow(err_norm, -0.2), 0.1, 1.0);
            }
        }
    }

    long accepted() const { return accepted_; }
    long rejected() const { return rejected_; }

private:
    double initial_step(const State& y, double span) const
    {
        if (options_.initial_step > 0.0)
            return options_.initial_step;
        const double y_norm = y.cwiseAbs().maxCoeff();
        const double f_norm = k1_.cwiseAbs().maxCoeff();
        if (f_norm == 0.0)
            return span;
        return std::min(span, 0.01 * std::max(y_norm, options_.atol) / f_norm);
    }

    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    Rhs rhs_;
    AdaptiveOptions options_;
    State k1_;
    double k1_time_ = 0.0;
    bool have_k1_ = false;
    double h_ = 0.0;
    long steps_ = 0;
    long accepted_ = 0;
    long rejected_ = 0;
};

} // namespace cavcat

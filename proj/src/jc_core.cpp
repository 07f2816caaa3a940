#include "cavcat/jc_core.hpp"

#include <cmath>
#include <numbers>

#include "cavcat/errors.hpp"

namespace cavcat {

namespace {

void require_resonance(const DressedFrame& frame)
{
    if (!frame.resonant())
        throw UnsupportedRegimeError("dressed ladder relations are only available at resonance");
}

void require_level(const DressedFrame& frame, int n)
{
    if (n < 0 || n > frame.truncation())
        throw InvalidArgument("dressed level index out of range");
}

} // namespace

JCParams::JCParams(double g_, double detuning_, double omega_)
    : g(g_), detuning(detuning_), omega(omega_)
{
    if (!(g >= 0.0) || !std::isfinite(g))
        throw InvalidArgument("coupling g must be finite and >= 0");
    if (!std::isfinite(detuning) || !std::isfinite(omega))
        throw InvalidArgument("detuning and omega must be finite");
}

double LadderAction::squared_norm() const
{
    double s = 0.0;
    for (const auto& t : *this)
        s += t.coefficient * t.coefficient;
    return s;
}

DressedFrame::DressedFrame(const JCParams& params, int truncation)
    : params_(params), truncation_(truncation)
{
    if (truncation < 1)
        throw InvalidArgument("truncation must be >= 1");
    if (!(params.g > 0.0))
        throw InvalidArgument("dressed frame needs g > 0");

    const int size = truncation + 1;
    mixing_angles_.resize(size);
    energies_plus_.resize(size);
    energies_minus_.resize(size);
    gap_.resize(size);
    gamma_plus_.resize(size);
    gamma_minus_.resize(size);

    const double dw = params.detuning;
    const double g = params.g;
    for (int n = 0; n < size; ++n) {
        const double root = std::sqrt(dw * dw + 4.0 * g * g * (n + 1));
        mixing_angles_[n] = std::atan2(2.0 * g * std::sqrt(n + 1.0), dw + root);
        const double half_split = std::sqrt(dw * dw / 4.0 + g * g * (n + 1));
        energies_plus_[n] = params.omega * (n + 0.5) + half_split;
        energies_minus_[n] = params.omega * (n + 0.5) - half_split;
        gap_[n] = root;
        const double up = std::sqrt(n + 1.0), down = std::sqrt(double(n));
        gamma_plus_[n] = (up + down) * (up + down) / 4.0;
        gamma_minus_[n] = (up - down) * (up - down) / 4.0;
    }
    ground_energy_ = -(params.omega + params.detuning) / 2.0;
}

double DressedFrame::interaction_energy(DressedLevel level) const
{
    switch (level.branch) {
    case Branch::Ground:
        return ground_energy_ + params_.omega / 2.0;
    case Branch::Plus:
        return gap_[level.n] / 2.0;
    case Branch::Minus:
        return -gap_[level.n] / 2.0;
    }
    return 0.0;
}

DressedFrame build_dressed_frame(const JCParams& params, int truncation)
{
    return DressedFrame(params, truncation);
}

LadderAction apply_creation_dressed(const DressedFrame& frame, Branch branch, int n)
{
    return apply_creation_dressed(frame, DressedLevel{branch, branch == Branch::Ground ? -1 : n});
}

LadderAction apply_annihilation_dressed(const DressedFrame& frame, Branch branch, int n)
{
    return apply_annihilation_dressed(frame, DressedLevel{branch, branch == Branch::Ground ? -1 : n});
}

LadderAction apply_creation_dressed(const DressedFrame& frame, DressedLevel level)
{
    require_resonance(frame);
    LadderAction out;
    if (level.branch == Branch::Ground) {
        // a^*|0,-> = |1,-> = (|psi^+_0> - |psi^-_0>)/sqrt2
        out.terms[0] = {std::numbers::sqrt2 / 2.0, {Branch::Plus, 0}};
        out.terms[1] = {-std::numbers::sqrt2 / 2.0, {Branch::Minus, 0}};
        out.size = 2;
        return out;
    }
    require_level(frame, level.n);
    const double a = std::sqrt(level.n + 1.0), b = std::sqrt(level.n + 2.0);
    const double s = level.branch == Branch::Plus ? 1.0 : -1.0;
    out.terms[0] = {0.5 * (a + s * b), {Branch::Plus, level.n + 1}};
    out.terms[1] = {0.5 * (a - s * b), {Branch::Minus, level.n + 1}};
    out.size = 2;
    return out;
}

LadderAction apply_annihilation_dressed(const DressedFrame& frame, DressedLevel level)
{
    require_resonance(frame);
    LadderAction out;
    if (level.branch == Branch::Ground)
        return out;
    require_level(frame, level.n);
    const double s = level.branch == Branch::Plus ? 1.0 : -1.0;
    if (level.n == 0) {
        // a|psi^{+-}_0> = +-|0,->/sqrt2: the formal level -1 pair collapses onto the ground state.
        out.terms[0] = {s * std::numbers::sqrt2 / 2.0, DressedLevel::ground()};
        out.size = 1;
        return out;
    }
    const double a = std::sqrt(double(level.n)), b = std::sqrt(level.n + 1.0);
    out.terms[0] = {0.5 * (a + s * b), {Branch::Plus, level.n - 1}};
    out.terms[1] = {0.5 * (a - s * b), {Branch::Minus, level.n - 1}};
    out.size = 2;
    return out;
}

} // namespace cavcat

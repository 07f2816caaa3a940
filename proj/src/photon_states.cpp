#include "cavcat/photon_states.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "cavcat/errors.hpp"
#include "cavcat/numerics.hpp"

namespace cavcat {

namespace {

constexpr double kDegenerateNorm = 1e-12;

void check_truncation(int truncation)
{
    if (truncation < 1)
        throw InvalidArgument("truncation must be >= 1");
}

void check_intensity(double intensity)
{
    if (!(intensity >= 0.0) || !std::isfinite(intensity))
        throw InvalidArgument("intensity must be finite and >= 0");
}

double poisson_pmf(double mean, int n)
{
    return std::exp(log_poisson_weight(mean, static_cast<double>(n)));
}

} // namespace

CatSpec::CatSpec(double intensity, double phase)
    : intensity_(intensity)
{
    check_intensity(intensity);
    if (!std::isfinite(phase))
        throw InvalidArgument("phase must be finite");
    constexpr double two_pi = 2.0 * std::numbers::pi;
    phase_ = std::fmod(phase, two_pi);
    if (phase_ < 0.0)
        phase_ += two_pi;
    if (phase_ >= two_pi)
        phase_ = 0.0;
}

double CatSpec::normalization() const
{
    return 2.0 + 2.0 * std::cos(phase_) * std::exp(-2.0 * intensity_);
}

PhotonDistribution::PhotonDistribution(Eigen::VectorXd probs)
    : probs_(std::move(probs))
{
    if (probs_.size() < 2)
        throw InvalidArgument("distribution needs at least two Fock levels");
    for (Eigen::Index n = 0; n < probs_.size(); ++n) {
        if (!(probs_[n] >= 0.0 && probs_[n] <= 1.0))
            throw InvalidArgument("photon probability outside [0, 1]");
    }
    const double total = probs_.sum();
    if (total > 1.0 + 1e-12)
        throw InvalidArgument("photon probabilities sum above 1");
    if (total < 1.0 - kMaxTruncationLoss) {
        std::ostringstream msg;
        msg << "truncation N=" << probs_.size() - 1 << " loses " << 1.0 - total
            << " of the photon-number mass (limit " << kMaxTruncationLoss << ")";
        throw TruncationLossError(msg.str());
    }
}

double PhotonDistribution::mean() const
{
    return Eigen::VectorXd::LinSpaced(probs_.size(), 0.0, double(probs_.size() - 1))
        .dot(probs_);
}

int default_truncation(double mean_photons)
{
    return std::max(32, static_cast<int>(std::ceil(mean_photons + 10.0 * std::sqrt(mean_photons + 1.0))));
}

PhotonDistribution coherent_distribution(double intensity, int truncation)
{
    check_intensity(intensity);
    check_truncation(truncation);
    Eigen::VectorXd p(truncation + 1);
    for (int n = 0; n <= truncation; ++n)
        p[n] = poisson_pmf(intensity, n);
    return PhotonDistribution(std::move(p));
}

PhotonDistribution cat_distribution(const CatSpec& cat, int truncation)
{
    check_truncation(truncation);
    const double norm = cat.normalization();
    if (norm < kDegenerateNorm)
        throw DegenerateStateError("cat state has vanishing norm");
    const double c = std::cos(cat.phase());
    Eigen::VectorXd p(truncation + 1);
    for (int n = 0; n <= truncation; ++n) {
        const double parity = (n % 2 == 0) ? 1.0 : -1.0;
        p[n] = poisson_pmf(cat.intensity(), n) * 2.0 * (1.0 + c * parity) / norm;
    }
    // cos(pi) is not exactly -1; clear the roundoff residue on suppressed parities.
    for (int n = 0; n <= truncation; ++n)
        p[n] = std::clamp(p[n], 0.0, 1.0);
    return PhotonDistribution(std::move(p));
}

double cat_mean_photons(const CatSpec& cat)
{
    if (cat.normalization() < kDegenerateNorm)
        throw DegenerateStateError("cat state has vanishing norm");
    const double ce = std::cos(cat.phase()) * std::exp(-2.0 * cat.intensity());
    return cat.intensity() * (1.0 - ce) / (1.0 + ce);
}

double branch_overlap(double intensity)
{
    check_intensity(intensity);
    return std::exp(-2.0 * intensity);
}

Eigen::VectorXd coherent_amplitudes(double intensity, int truncation, int sign)
{
    check_intensity(intensity);
    check_truncation(truncation);
    Eigen::VectorXd c(truncation + 1);
    for (int n = 0; n <= truncation; ++n) {
        const double magnitude = std::exp(0.5 * log_poisson_weight(intensity, double(n)));
        c[n] = (sign < 0 && n % 2 == 1) ? -magnitude : magnitude;
    }
    return c;
}

Eigen::VectorXcd cat_amplitudes(const CatSpec& cat, int truncation)
{
    const double norm = cat.normalization();
    if (norm < kDegenerateNorm)
        throw DegenerateStateError("cat state has vanishing norm");
    const Eigen::VectorXd plus = coherent_amplitudes(cat.intensity(), truncation, +1);
    const Eigen::VectorXd minus = coherent_amplitudes(cat.intensity(), truncation, -1);
    const std::complex<double> rel = std::polar(1.0, cat.phase());
    return (plus.cast<std::complex<double>>() + rel * minus.cast<std::complex<double>>())
           / std::sqrt(norm);
}

} // namespace cavcat

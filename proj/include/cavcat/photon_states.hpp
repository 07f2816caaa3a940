#pragma once

#include <Eigen/Dense>

namespace cavcat {

// Schroedinger-cat field (|z> + e^{i phase}|-z>), parameterized by |z|^2 only;
// the complex phase of z never enters an observable.
class CatSpec {
public:
    CatSpec(double intensity, double phase);

    double intensity() const { return intensity_; }
    // Reduced to [0, 2pi).
    double phase() const { return phase_; }

    // 2 + 2 cos(phase) e^{-2 intensity}; the squared norm of |z> + e^{i phase}|-z>.
    double normalization() const;

private:
    double intensity_;
    double phase_;
};

// Photon-number probabilities p_0..p_N. Construction checks that every entry
// lies in [0, 1] and that the truncation keeps all but 1e-10 of the mass.
class PhotonDistribution {
public:
    static constexpr double kMaxTruncationLoss = 1e-10;

    explicit PhotonDistribution(Eigen::VectorXd probs);

    int truncation() const { return static_cast<int>(probs_.size()) - 1; }
    const Eigen::VectorXd& probs() const { return probs_; }
    double operator[](int n) const { return probs_[n]; }
    double total() const { return probs_.sum(); }
    double mean() const;

private:
    Eigen::VectorXd probs_;
};

// N = max(32, ceil(nbar + 10 sqrt(nbar + 1))).
int default_truncation(double mean_photons);

PhotonDistribution coherent_distribution(double intensity, int truncation);
PhotonDistribution cat_distribution(const CatSpec& cat, int truncation);

double cat_mean_photons(const CatSpec& cat);

// |<z|-z>|^2
double branch_overlap(double intensity);

// Fock amplitudes of the coherent state |sign * sqrt(intensity)>.
Eigen::VectorXd coherent_amplitudes(double intensity, int truncation, int sign = +1);

// Normalized Fock amplitudes of the cat state (complex because of the relative phase).
Eigen::VectorXcd cat_amplitudes(const CatSpec& cat, int truncation);

} // namespace cavcat

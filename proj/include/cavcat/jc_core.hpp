#pragma once

#include <array>

#include <Eigen/Dense>

namespace cavcat {

// Jaynes-Cummings parameters in s^-1 (hbar = 1). `omega` is the cavity
// frequency; every observable computed here is independent of it.
struct JCParams {
    explicit JCParams(double g, double detuning = 0.0, double omega = 0.0);

    double g;
    double detuning; // omega_0 - omega
    double omega;

    bool resonant() const { return detuning == 0.0; }
};

enum class Branch { Plus, Minus, Ground };

// Bare atomic level |+> (excited) or |-> (ground).
enum class AtomLevel { Excited, Ground };

// A dressed state: |psi^+_n>, |psi^-_n> (n >= 0) or the ground state |0,->.
struct DressedLevel {
    Branch branch;
    int n; // -1 for Ground

    static DressedLevel ground() { return {Branch::Ground, -1}; }
    friend bool operator==(const DressedLevel&, const DressedLevel&) = default;
};

struct LadderTerm {
    double coefficient;
    DressedLevel target;
};

// At most two terms; `size` of them are populated.
struct LadderAction {
    std::array<LadderTerm, 2> terms{};
    int size = 0;

    const LadderTerm* begin() const { return terms.data(); }
    const LadderTerm* end() const { return terms.data() + size; }
    double squared_norm() const;
};

// Dressed eigensystem of the JC doublets n = 0..N:
//   |psi^+_n> =  cos(theta_n)|n+1,-> + sin(theta_n)|n,+>
//   |psi^-_n> = -sin(theta_n)|n+1,-> + cos(theta_n)|n,+>
class DressedFrame {
public:
    DressedFrame(const JCParams& params, int truncation);

    const JCParams& params() const { return params_; }
    int truncation() const { return truncation_; }
    bool resonant() const { return params_.resonant(); }

    const Eigen::VectorXd& mixing_angles() const { return mixing_angles_; }
    const Eigen::VectorXd& energies_plus() const { return energies_plus_; }
    const Eigen::VectorXd& energies_minus() const { return energies_minus_; }
    const Eigen::VectorXd& gap() const { return gap_; }
    const Eigen::VectorXd& gamma_plus() const { return gamma_plus_; }
    const Eigen::VectorXd& gamma_minus() const { return gamma_minus_; }
    double ground_energy() const { return ground_energy_; }

    // Energy with the free part omega (n + 1/2) removed; the frame in which the
    // oracle integrates. Ground state gives (omega - omega_0)/2.
    double interaction_energy(DressedLevel level) const;

private:
    JCParams params_;
    int truncation_;
    Eigen::VectorXd mixing_angles_;
    Eigen::VectorXd energies_plus_;
    Eigen::VectorXd energies_minus_;
    Eigen::VectorXd gap_;
    Eigen::VectorXd gamma_plus_;
    Eigen::VectorXd gamma_minus_;
    double ground_energy_;
};

DressedFrame build_dressed_frame(const JCParams& params, int truncation);

// a^* acting on a dressed state, expanded on dressed states of the next level.
// Resonance only; throws UnsupportedRegimeError otherwise.
LadderAction apply_creation_dressed(const DressedFrame& frame, Branch branch, int n);

// a acting on a dressed state. For n = 0 the result lies in the ground sector
// and is returned as a single term on DressedLevel::ground(); a on the ground
// state vanishes (size 0).
LadderAction apply_annihilation_dressed(const DressedFrame& frame, Branch branch, int n);

LadderAction apply_creation_dressed(const DressedFrame& frame, DressedLevel level);
LadderAction apply_annihilation_dressed(const DressedFrame& frame, DressedLevel level);

} // namespace cavcat

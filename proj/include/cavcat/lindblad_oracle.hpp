#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "cavcat/dissipative_dynamics.hpp"
#include "cavcat/jc_core.hpp"
#include "cavcat/photon_states.hpp"

// Brute-force reference: the full atom (x) field master equation in a truncated
// Fock basis. Everything here works in the interaction picture with respect to
// omega (a^*a + sigma_z / 2), so stored matrices are rho_I(t); omega itself
// never enters.
namespace cavcat::oracle {

using Complex = std::complex<double>;
using SparseMatrixXcd = Eigen::SparseMatrix<Complex>;

// Dissipation rates for the oracle. Unlike DampingParams, kappa = 0 is allowed.
struct Dissipation {
    Dissipation() = default;
    Dissipation(double kappa, double n_thermal);
    Dissipation(const DampingParams& damping) // NOLINT(google-explicit-constructor)
        : Dissipation(damping.kappa(), damping.n_thermal())
    {
    }

    double kappa = 0.0;
    double n_thermal = 0.0;
};

// Density matrix over |n, s>, n = 0..N, s in {+, -}; |n,+> has index 2n and
// |n,-> index 2n + 1.
class DensityMatrix {
public:
    DensityMatrix(Eigen::MatrixXcd rho, int truncation, double time = 0.0);

    static int index(int n, AtomLevel s) { return 2 * n + (s == AtomLevel::Excited ? 0 : 1); }
    static int dimension(int truncation) { return 2 * (truncation + 1); }

    const Eigen::MatrixXcd& matrix() const { return rho_; }
    int truncation() const { return truncation_; }
    int dim() const { return static_cast<int>(rho_.rows()); }
    double time() const { return time_; }

    Complex trace() const { return rho_.trace(); }
    double hermiticity_defect() const;
    double min_eigenvalue() const;
    double purity() const;

    // Tr_A(<s| rho |s>) as an (N+1) x (N+1) field operator (unnormalized).
    Eigen::MatrixXcd field_block(AtomLevel s) const;
    // Tr_A rho.
    Eigen::MatrixXcd reduced_field() const;

private:
    Eigen::MatrixXcd rho_;
    int truncation_;
    double time_;
};

// |field><field| (x) |+><+|. The field vector keeps all Fock coherences.
DensityMatrix build_initial_state(const Eigen::VectorXcd& field_amplitudes);
DensityMatrix build_initial_state(const CatSpec& cat, int truncation);
DensityMatrix build_coherent_initial_state(double intensity, int truncation);
DensityMatrix build_fock_initial_state(int photons, int truncation);
// field_operator (x) |+><+| for an arbitrary field operator.
DensityMatrix tensor_excited_atom(const Eigen::MatrixXcd& field_operator, double time = 0.0);

// The cat's interference part: (e^{-i phase}|z><-z| + e^{i phase}|-z><z|) / norm,
// tensored with an excited atom. Its trace norm measures branch coherence.
Eigen::MatrixXcd cat_cross_term(const CatSpec& cat, int truncation);

// Sum of |eigenvalues| of a Hermitian matrix.
double trace_norm(const Eigen::MatrixXcd& hermitian);

// Fock-basis operators on the truncated atom (x) field space.
struct FockOperators {
    explicit FockOperators(int truncation);

    int truncation;
    SparseMatrixXcd annihilation; // a (x) 1
    SparseMatrixXcd creation;     // a^* (x) 1
    SparseMatrixXcd sigma_z;
    SparseMatrixXcd coupling;     // a sigma_+ + a^* sigma_-
};

// Right-hand side of the master equation in the interaction picture:
//   d rho/dt = -i[H_I, rho] + 2 kappa (n_b+1) D[a] rho + 2 kappa n_b D[a^*] rho
// with H_I = (detuning/2) sigma_z + g (a sigma_+ + a^* sigma_-).
class LindbladGenerator {
public:
    LindbladGenerator(const JCParams& jc, const Dissipation& dissipation, int truncation);

    int truncation() const { return truncation_; }
    int dim() const { return DensityMatrix::dimension(truncation_); }
    const SparseMatrixXcd& hamiltonian() const { return hamiltonian_; }

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;

    // Calls sink(row, col, value) for every nonzero of L(|i><j|).
    template <typename Sink>
    void unit_image(int i, int j, Sink&& sink) const;

private:
    int truncation_;
    double loss_rate_;  // 2 kappa (n_b + 1)
    double gain_rate_;  // 2 kappa n_b
    SparseMatrixXcd hamiltonian_;
    SparseMatrixXcd effective_;     // H_I - (i/2)(loss a^*a + gain a a^*)
    SparseMatrixXcd effective_adj_;
    SparseMatrixXcd annihilation_;
    SparseMatrixXcd creation_;
};

// Adaptive Dormand-Prince integration of the master equation to local
// tolerance tol (relative and absolute). Throws StiffnessError on step-size
// underflow and ConsistencyError if the trace drifts by more than 10 tol.
DensityMatrix integrate(const DensityMatrix& rho0, const JCParams& jc, const Dissipation& dissipation,
                        double t, double tol = 1e-8);

// Samples at the requested (non-decreasing, >= rho0.time()) times.
std::vector<DensityMatrix> integrate_trajectory(const DensityMatrix& rho0, const JCParams& jc,
                                                const Dissipation& dissipation,
                                                const std::vector<double>& times, double tol = 1e-8);

// Exact propagation e^{L t} using the conservation of k_row - k_col, where k is
// the excitation number n + [s = +]. L splits into blocks of size O(N), each
// exponentiated once per step length. Used for long horizons (g t ~ 10^3 and
// beyond) where explicit stepping is too slow.
class BlockPropagator {
public:
    explicit BlockPropagator(const LindbladGenerator& generator);

    int dim() const { return dim_; }
    std::size_t block_count() const { return blocks_.size(); }

    // Repeated application of e^{L dt}, by binary powers.
    class Stepper {
    public:
        double step() const { return dt_; }
        void advance(Eigen::MatrixXcd& rho, long steps = 1) const;
        DensityMatrix advance(const DensityMatrix& rho, long steps = 1) const;

    private:
        friend class BlockPropagator;
        const BlockPropagator* owner_ = nullptr;
        double dt_ = 0.0;
        // powers_[level][block] = e^{L_block dt 2^level}
        std::vector<std::vector<Eigen::MatrixXcd>> powers_;
    };

    // Supports advancing by up to max_steps steps per call.
    Stepper stepper(double dt, long max_steps = 1) const;

    Eigen::MatrixXcd propagate(const Eigen::MatrixXcd& rho, double t) const;
    DensityMatrix propagate(const DensityMatrix& rho, double t) const;

private:
    struct Block {
        std::vector<Eigen::Index> entries; // column-major linear indices into rho
        Eigen::MatrixXcd generator;
    };

    void apply_blocks(Eigen::MatrixXcd& rho, const std::vector<Eigen::MatrixXcd>& maps) const;

    int dim_;
    int truncation_;
    std::vector<Block> blocks_;
};

// W(t) = e^{iHt} rho(t) e^{-iHt} expressed in the dressed basis, ordered
// |psi_0> (ground), |psi^+_0>, |psi^-_0>, ..., |psi^+_{N-1}>, |psi^-_{N-1}>, |N,+>.
// The last state is the truncation edge: its partner |N+1,-> is outside the basis.
class WFrameMatrix {
public:
    WFrameMatrix(Eigen::MatrixXcd w, int truncation, double time);

    static int dressed_index(DressedLevel level, int truncation);
    static int edge_index(int truncation) { return 2 * truncation + 1; }

    const Eigen::MatrixXcd& matrix() const { return w_; }
    int truncation() const { return truncation_; }
    double time() const { return time_; }

    Complex element(DressedLevel row, DressedLevel col) const;
    Complex ground() const { return element(DressedLevel::ground(), DressedLevel::ground()); }
    Complex plus_plus(int n) const { return element({Branch::Plus, n}, {Branch::Plus, n}); }
    Complex minus_minus(int n) const { return element({Branch::Minus, n}, {Branch::Minus, n}); }
    Complex plus_minus(int n) const { return element({Branch::Plus, n}, {Branch::Minus, n}); }
    // F_n for n = 0..N-1; F_{-1} = 2 <psi_0|W|psi_0>.
    double f(int n) const { return (plus_plus(n) + minus_minus(n)).real(); }
    double f_ground() const { return 2.0 * ground().real(); }

private:
    Eigen::MatrixXcd w_;
    int truncation_;
    double time_;
};

// Columns are the dressed states (ordering of WFrameMatrix) in the Fock basis.
Eigen::MatrixXd dressed_basis(const DressedFrame& frame, int truncation);

// Interaction-picture energies in WFrameMatrix ordering.
Eigen::VectorXd dressed_energies(const DressedFrame& frame, int truncation);

// <p|a|q> in the dressed basis, assembled from the dressed ladder relations.
Eigen::MatrixXd dressed_annihilation(const DressedFrame& frame, int truncation);

// Resonance only.
WFrameMatrix to_w_frame(const DensityMatrix& rho, const DressedFrame& frame);
DensityMatrix from_w_frame(const WFrameMatrix& w, const DressedFrame& frame);

// dW/dt in the dressed basis at time t: the damping terms with a replaced by
// e^{iHt} a e^{-iHt}. With `secular`, every term oscillating at a nonzero
// dressed-energy difference is dropped.
Eigen::MatrixXcd w_frame_rhs(const WFrameMatrix& w, const DressedFrame& frame,
                             const Dissipation& dissipation, bool secular = false);

struct WResidualReport {
    double diagonal_upper = 0.0;    // <psi^{+-}_n|dW|psi^{+-}_n>, n >= 1
    double diagonal_lowest = 0.0;   // same at n = 0
    double offdiagonal_upper = 0.0; // <psi^{+-}_n|dW|psi^{-+}_n>, n >= 1
    double offdiagonal_lowest = 0.0;
    double w_norm = 0.0;            // max Frobenius norm of W along the samples

    double max() const;
};

// Compares centered differences of a uniformly sampled W trajectory (spacing dt)
// with the right-hand sides of the dressed-frame equations at interior samples.
WResidualReport w_equation_residuals(const std::vector<WFrameMatrix>& trajectory,
                                     const DressedFrame& frame, const Dissipation& dissipation,
                                     double dt, bool secular = false);

// Accumulated effect of the dropped oscillating terms: the largest doublet entry
// of W(t_k) - W(t_0) - int_{t_0}^{t_k} secular RHS dt (trapezoidal rule), over
// the samples, divided by max ||W||. The oscillating terms integrate to
// O(kappa/g) because their frequencies are O(g).
double secular_mismatch(const std::vector<WFrameMatrix>& trajectory, const DressedFrame& frame,
                        const Dissipation& dissipation, double dt);

// 1/e decay time of the trace norm of the evolved cat cross term, found by
// stepping at `samples` points per t_cav/(nbar (1 + n_b)) and interpolating
// log(norm) linearly. Throws ConsistencyError if no crossing within 20 of those.
double branch_coherence_time(const CatSpec& cat, const JCParams& jc, const DampingParams& damping,
                             int truncation, int samples = 40);

struct OracleSnapshot {
    double time = 0.0;
    double p_excited = 0.0;
    Eigen::VectorXd field_excited; // <n,+|rho|n,+>
    Eigen::VectorXd field_ground;  // <n,-|rho|n,->
    Eigen::VectorXd f;             // F_n, n = 0..N-1
    double f_ground = 0.0;         // F_{-1}
    Eigen::VectorXcd offdiag;      // <psi^+_n|W|psi^-_n>
    double trace = 0.0;
};

OracleSnapshot oracle_observables(const DensityMatrix& rho, const DressedFrame& frame);
std::vector<OracleSnapshot> oracle_observables(const std::vector<DensityMatrix>& trajectory,
                                               const DressedFrame& frame);

// Projects the atom onto `outcome` (keeping the unnormalized weight) and
// replaces it by a fresh excited atom.
DensityMatrix condition_and_reinject(const DensityMatrix& rho, AtomLevel outcome);

// Lines of "t, observable-name, value".
void write_trajectory_dump(std::ostream& out, const std::vector<OracleSnapshot>& snapshots);

// ---------------------------------------------------------------------------

template <typename Sink>
void LindbladGenerator::unit_image(int i, int j, Sink&& sink) const
{
    static const Complex I(0.0, 1.0);
    // -i K |i><j|  -> column j holds -i K(:, i)
    for (SparseMatrixXcd::InnerIterator it(effective_, i); it; ++it)
        sink(static_cast<int>(it.row()), j, -I * it.value());
    // +i |i><j| K^*  -> row i holds i K^*(j, :) = i conj(K(:, j))^T
    for (SparseMatrixXcd::InnerIterator it(effective_, j); it; ++it)
        sink(i, static_cast<int>(it.row()), I * std::conj(it.value()));
    if (loss_rate_ != 0.0) {
        for (SparseMatrixXcd::InnerIterator r(annihilation_, i); r; ++r)
            for (SparseMatrixXcd::InnerIterator c(annihilation_, j); c; ++c)
                sink(static_cast<int>(r.row()), static_cast<int>(c.row()),
                     loss_rate_ * r.value() * std::conj(c.value()));
    }
    if (gain_rate_ != 0.0) {
        for (SparseMatrixXcd::InnerIterator r(creation_, i); r; ++r)
            for (SparseMatrixXcd::InnerIterator c(creation_, j); c; ++c)
                sink(static_cast<int>(r.row()), static_cast<int>(c.row()),
                     gain_rate_ * r.value() * std::conj(c.value()));
    }
}

} // namespace cavcat::oracle

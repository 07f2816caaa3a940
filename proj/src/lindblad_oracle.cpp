#include "cavcat/lindblad_oracle.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "cavcat/errors.hpp"
#include "cavcat/ode.hpp"

namespace cavcat::oracle {

namespace {

using Triplet = Eigen::Triplet<Complex>;

constexpr int kExcited = 0;
constexpr int kGround = 1;

SparseMatrixXcd from_triplets(int dim, const std::vector<Triplet>& triplets)
{
    SparseMatrixXcd m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

int excitation(int index)
{
    return index / 2 + (index % 2 == kExcited ? 1 : 0);
}

void require_resonance(const DressedFrame& frame)
{
    if (!frame.resonant())
        throw UnsupportedRegimeError("W-frame transform is only available at resonance");
}

void check_frame(const DressedFrame& frame, int truncation)
{
    if (frame.truncation() < truncation)
        throw InvalidArgument("dressed frame is smaller than the oracle truncation");
}

} // namespace

Dissipation::Dissipation(double kappa_, double n_thermal_)
    : kappa(kappa_), n_thermal(n_thermal_)
{
    if (!(kappa >= 0.0) || !(n_thermal >= 0.0))
        throw InvalidArgument("dissipation rates must be >= 0");
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(Eigen::MatrixXcd rho, int truncation, double time)
    : rho_(std::move(rho)), truncation_(truncation), time_(time)
{
    if (truncation < 1)
        throw InvalidArgument("truncation must be >= 1");
    if (rho_.rows() != dimension(truncation) || rho_.cols() != dimension(truncation))
        throw InvalidArgument("density matrix has the wrong dimension for its truncation");
}

double DensityMatrix::hermiticity_defect() const
{
    return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const
{
    const Eigen::MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double DensityMatrix::purity() const
{
    return (rho_ * rho_).trace().real();
}

Eigen::MatrixXcd DensityMatrix::field_block(AtomLevel s) const
{
    const int offset = s == AtomLevel::Excited ? kExcited : kGround;
    const int size = truncation_ + 1;
    Eigen::MatrixXcd block(size, size);
    for (int m = 0; m < size; ++m)
        for (int n = 0; n < size; ++n)
            block(n, m) = rho_(2 * n + offset, 2 * m + offset);
    return block;
}

Eigen::MatrixXcd DensityMatrix::reduced_field() const
{
    return field_block(AtomLevel::Excited) + field_block(AtomLevel::Ground);
}

// ---------------------------------------------------------------------------
// Initial states

DensityMatrix tensor_excited_atom(const Eigen::MatrixXcd& field_operator, double time)
{
    const int size = static_cast<int>(field_operator.rows());
    if (field_operator.cols() != size || size < 2)
        throw InvalidArgument("field operator must be square with at least two levels");
    const int truncation = size - 1;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(2 * size, 2 * size);
    for (int m = 0; m < size; ++m)
        for (int n = 0; n < size; ++n)
            rho(2 * n + kExcited, 2 * m + kExcited) = field_operator(n, m);
    return DensityMatrix(std::move(rho), truncation, time);
}

DensityMatrix build_initial_state(const Eigen::VectorXcd& field_amplitudes)
{
    return tensor_excited_atom(field_amplitudes * field_amplitudes.adjoint());
}

DensityMatrix build_initial_state(const CatSpec& cat, int truncation)
{
    return build_initial_state(cat_amplitudes(cat, truncation));
}

DensityMatrix build_coherent_initial_state(double intensity, int truncation)
{
    return build_initial_state(
        Eigen::VectorXcd(coherent_amplitudes(intensity, truncation).cast<Complex>()));
}

DensityMatrix build_fock_initial_state(int photons, int truncation)
{
    if (photons < 0 || photons > truncation)
        throw InvalidArgument("Fock state outside the truncation");
    Eigen::VectorXcd field = Eigen::VectorXcd::Zero(truncation + 1);
    field[photons] = 1.0;
    return build_initial_state(field);
}

Eigen::MatrixXcd cat_cross_term(const CatSpec& cat, int truncation)
{
    const double norm = cat.normalization();
    if (norm < 1e-12)
        throw DegenerateStateError("cat state has vanishing norm");
    const Eigen::VectorXcd plus = coherent_amplitudes(cat.intensity(), truncation, +1).cast<Complex>();
    const Eigen::VectorXcd minus = coherent_amplitudes(cat.intensity(), truncation, -1).cast<Complex>();
    const Complex rel = std::polar(1.0, cat.phase());
    const Eigen::MatrixXcd field =
        (std::conj(rel) * plus * minus.adjoint() + rel * minus * plus.adjoint()) / norm;
    return tensor_excited_atom(field).matrix();
}

double trace_norm(const Eigen::MatrixXcd& hermitian)
{
    const Eigen::MatrixXcd h = 0.5 * (hermitian + hermitian.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
}

// ---------------------------------------------------------------------------
// Operators and generator

FockOperators::FockOperators(int truncation_)
    : truncation(truncation_)
{
    if (truncation < 1)
        throw InvalidArgument("truncation must be >= 1");
    const int dim = DensityMatrix::dimension(truncation);
    std::vector<Triplet> a, sz, coupling;
    for (int n = 1; n <= truncation; ++n) {
        const double root = std::sqrt(double(n));
        for (int s : {kExcited, kGround})
            a.emplace_back(2 * (n - 1) + s, 2 * n + s, root);
        // a sigma_+ |n,-> = sqrt(n) |n-1,+>  and its adjoint
        coupling.emplace_back(2 * (n - 1) + kExcited, 2 * n + kGround, root);
        coupling.emplace_back(2 * n + kGround, 2 * (n - 1) + kExcited, root);
    }
    for (int n = 0; n <= truncation; ++n) {
        sz.emplace_back(2 * n + kExcited, 2 * n + kExcited, 1.0);
        sz.emplace_back(2 * n + kGround, 2 * n + kGround, -1.0);
    }
    annihilation = from_triplets(dim, a);
    creation = SparseMatrixXcd(annihilation.adjoint());
    sigma_z = from_triplets(dim, sz);
    this->coupling = from_triplets(dim, coupling);
}

LindbladGenerator::LindbladGenerator(const JCParams& jc, const Dissipation& dissipation,
                                     int truncation)
    : truncation_(truncation),
      loss_rate_(2.0 * dissipation.kappa * (dissipation.n_thermal + 1.0)),
      gain_rate_(2.0 * dissipation.kappa * dissipation.n_thermal)
{
    const FockOperators ops(truncation);
    annihilation_ = ops.annihilation;
    creation_ = ops.creation;
    hamiltonian_ = SparseMatrixXcd(0.5 * jc.detuning * ops.sigma_z + jc.g * ops.coupling);
    const SparseMatrixXcd number = SparseMatrixXcd(creation_ * annihilation_);
    const SparseMatrixXcd anti_number = SparseMatrixXcd(annihilation_ * creation_);
    const Complex half_i(0.0, 0.5);
    effective_ = SparseMatrixXcd(hamiltonian_ - half_i * (loss_rate_ * number + gain_rate_ * anti_number));
    effective_.makeCompressed();
    effective_adj_ = SparseMatrixXcd(effective_.adjoint());
}

Eigen::MatrixXcd LindbladGenerator::apply(const Eigen::MatrixXcd& rho) const
{
    static const Complex I(0.0, 1.0);
    Eigen::MatrixXcd out = -I * (effective_ * rho);
    out.noalias() += I * (rho * effective_adj_);
    if (loss_rate_ != 0.0)
        out.noalias() += loss_rate_ * ((annihilation_ * rho) * creation_);
    if (gain_rate_ != 0.0)
        out.noalias() += gain_rate_ * ((creation_ * rho) * annihilation_);
    return out;
}

// ---------------------------------------------------------------------------
// Adaptive integration

std::vector<DensityMatrix> integrate_trajectory(const DensityMatrix& rho0, const JCParams& jc,
                                                const Dissipation& dissipation,
                                                const std::vector<double>& times, double tol)
{
    if (!(tol > 0.0))
        throw InvalidArgument("tolerance must be > 0");
    const LindbladGenerator generator(jc, dissipation, rho0.truncation());
    auto rhs = [&generator](double, const Eigen::MatrixXcd& y) { return generator.apply(y); };
    AdaptiveOptions options;
    options.rtol = tol;
    options.atol = tol;
    DormandPrince<Eigen::MatrixXcd, decltype(rhs)> stepper(rhs, options);

    const Complex trace0 = rho0.trace();
    Eigen::MatrixXcd y = rho0.matrix();
    double t = rho0.time();
    std::vector<DensityMatrix> out;
    out.reserve(times.size());
    for (double target : times) {
        if (!(target >= t))
            throw InvalidArgument("sample times must be non-decreasing and >= the initial time");
        stepper.advance(y, t, target);
        const double drift = std::abs(y.trace() - trace0);
        if (drift > 10.0 * tol) {
            std::ostringstream msg;
            msg << "trace drifted by " << drift << " (tolerance " << tol << ")";
            throw ConsistencyError(msg.str());
        }
        out.emplace_back(y, rho0.truncation(), target);
    }
    return out;
}

DensityMatrix integrate(const DensityMatrix& rho0, const JCParams& jc, const Dissipation& dissipation,
                        double t, double tol)
{
    if (!(t >= 0.0))
        throw InvalidArgument("time must be >= 0");
    return integrate_trajectory(rho0, jc, dissipation, {rho0.time() + t}, tol).back();
}

// ---------------------------------------------------------------------------
// Block propagator

BlockPropagator::BlockPropagator(const LindbladGenerator& generator)
    : dim_(generator.dim()), truncation_(generator.truncation())
{
    const int max_k = truncation_ + 1;
    // Block of difference d = k_row - k_col stored at d + max_k.
    blocks_.resize(2 * max_k + 1);
    std::vector<int> position(std::size_t(dim_) * dim_);
    std::vector<int> block_of(std::size_t(dim_) * dim_);
    for (int j = 0; j < dim_; ++j) {
        for (int i = 0; i < dim_; ++i) {
            const Eigen::Index linear = i + Eigen::Index(j) * dim_;
            const int b = excitation(i) - excitation(j) + max_k;
            block_of[linear] = b;
            position[linear] = static_cast<int>(blocks_[b].entries.size());
            blocks_[b].entries.push_back(linear);
        }
    }
    for (auto& block : blocks_) {
        const auto m = static_cast<Eigen::Index>(block.entries.size());
        block.generator = Eigen::MatrixXcd::Zero(m, m);
    }
    for (int j = 0; j < dim_; ++j) {
        for (int i = 0; i < dim_; ++i) {
            const Eigen::Index in = i + Eigen::Index(j) * dim_;
            Block& block = blocks_[block_of[in]];
            const int column = position[in];
            generator.unit_image(i, j, [&](int r, int c, Complex value) {
                const Eigen::Index out = r + Eigen::Index(c) * dim_;
                if (block_of[out] != block_of[in])
                    throw ConsistencyError("generator mixes excitation-difference blocks");
                block.generator(position[out], column) += value;
            });
        }
    }
    std::erase_if(blocks_, [](const Block& b) { return b.entries.empty(); });
}

BlockPropagator::Stepper BlockPropagator::stepper(double dt, long max_steps) const
{
    if (!(dt >= 0.0))
        throw InvalidArgument("propagation step must be >= 0");
    if (max_steps < 1)
        throw InvalidArgument("max_steps must be >= 1");
    Stepper s;
    s.owner_ = this;
    s.dt_ = dt;
    std::vector<Eigen::MatrixXcd> level;
    level.reserve(blocks_.size());
    for (const auto& block : blocks_)
        level.push_back((block.generator * dt).exp());
    s.powers_.push_back(std::move(level));
    for (long reach = 2; reach <= max_steps; reach *= 2) {
        const auto& prev = s.powers_.back();
        std::vector<Eigen::MatrixXcd> next;
        next.reserve(prev.size());
        for (const auto& m : prev)
            next.push_back(m * m);
        s.powers_.push_back(std::move(next));
    }
    return s;
}

void BlockPropagator::apply_blocks(Eigen::MatrixXcd& rho,
                                   const std::vector<Eigen::MatrixXcd>& maps) const
{
    Complex* data = rho.data();
    Eigen::VectorXcd gathered;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const auto& entries = blocks_[b].entries;
        gathered.resize(static_cast<Eigen::Index>(entries.size()));
        for (std::size_t k = 0; k < entries.size(); ++k)
            gathered[Eigen::Index(k)] = data[entries[k]];
        const Eigen::VectorXcd mapped = maps[b] * gathered;
        for (std::size_t k = 0; k < entries.size(); ++k)
            data[entries[k]] = mapped[Eigen::Index(k)];
    }
}

void BlockPropagator::Stepper::advance(Eigen::MatrixXcd& rho, long steps) const
{
    if (steps < 0)
        throw InvalidArgument("cannot step backwards");
    if (rho.rows() != owner_->dim_ || rho.cols() != owner_->dim_)
        throw InvalidArgument("matrix dimension does not match the propagator");
    if (steps >= (1L << powers_.size()))
        throw InvalidArgument("stepper was built for fewer steps");
    for (std::size_t level = 0; level < powers_.size(); ++level) {
        if (steps & (1L << level))
            owner_->apply_blocks(rho, powers_[level]);
    }
}

DensityMatrix BlockPropagator::Stepper::advance(const DensityMatrix& rho, long steps) const
{
    Eigen::MatrixXcd m = rho.matrix();
    advance(m, steps);
    return DensityMatrix(std::move(m), rho.truncation(), rho.time() + double(steps) * dt_);
}

Eigen::MatrixXcd BlockPropagator::propagate(const Eigen::MatrixXcd& rho, double t) const
{
    Eigen::MatrixXcd out = rho;
    stepper(t).advance(out, 1);
    return out;
}

DensityMatrix BlockPropagator::propagate(const DensityMatrix& rho, double t) const
{
    return stepper(t).advance(rho, 1);
}

// ---------------------------------------------------------------------------
// Dressed frame

WFrameMatrix::WFrameMatrix(Eigen::MatrixXcd w, int truncation, double time)
    : w_(std::move(w)), truncation_(truncation), time_(time)
{
    if (w_.rows() != DensityMatrix::dimension(truncation) || w_.cols() != w_.rows())
        throw InvalidArgument("W matrix has the wrong dimension for its truncation");
}

int WFrameMatrix::dressed_index(DressedLevel level, int truncation)
{
    if (level.branch == Branch::Ground)
        return 0;
    if (level.n < 0 || level.n >= truncation)
        throw InvalidArgument("dressed level outside the truncated basis");
    return 1 + 2 * level.n + (level.branch == Branch::Plus ? 0 : 1);
}

Complex WFrameMatrix::element(DressedLevel row, DressedLevel col) const
{
    return w_(dressed_index(row, truncation_), dressed_index(col, truncation_));
}

Eigen::MatrixXd dressed_basis(const DressedFrame& frame, int truncation)
{
    check_frame(frame, truncation);
    const int dim = DensityMatrix::dimension(truncation);
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(dim, dim);
    u(DensityMatrix::index(0, AtomLevel::Ground), 0) = 1.0;
    for (int n = 0; n < truncation; ++n) {
        const double c = std::cos(frame.mixing_angles()[n]);
        const double s = std::sin(frame.mixing_angles()[n]);
        const int upper = DensityMatrix::index(n + 1, AtomLevel::Ground);
        const int lower = DensityMatrix::index(n, AtomLevel::Excited);
        const int plus = WFrameMatrix::dressed_index({Branch::Plus, n}, truncation);
        const int minus = WFrameMatrix::dressed_index({Branch::Minus, n}, truncation);
        u(upper, plus) = c;
        u(lower, plus) = s;
        u(upper, minus) = -s;
        u(lower, minus) = c;
    }
    u(DensityMatrix::index(truncation, AtomLevel::Excited), WFrameMatrix::edge_index(truncation)) = 1.0;
    return u;
}

Eigen::VectorXd dressed_energies(const DressedFrame& frame, int truncation)
{
    check_frame(frame, truncation);
    Eigen::VectorXd e(DensityMatrix::dimension(truncation));
    e[0] = frame.interaction_energy(DressedLevel::ground());
    for (int n = 0; n < truncation; ++n) {
        e[WFrameMatrix::dressed_index({Branch::Plus, n}, truncation)] =
            frame.interaction_energy({Branch::Plus, n});
        e[WFrameMatrix::dressed_index({Branch::Minus, n}, truncation)] =
            frame.interaction_energy({Branch::Minus, n});
    }
    e[WFrameMatrix::edge_index(truncation)] = frame.params().detuning / 2.0;
    return e;
}

Eigen::MatrixXd dressed_annihilation(const DressedFrame& frame, int truncation)
{
    check_frame(frame, truncation);
    const int dim = DensityMatrix::dimension(truncation);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (int n = 0; n < truncation; ++n) {
        for (Branch b : {Branch::Plus, Branch::Minus}) {
            const int col = WFrameMatrix::dressed_index({b, n}, truncation);
            for (const LadderTerm& term : apply_annihilation_dressed(frame, b, n))
                a(WFrameMatrix::dressed_index(term.target, truncation), col) += term.coefficient;
        }
    }
    // a|N,+> = sqrt(N)|N-1,+> = sqrt(N)(|psi^+_{N-1}> + |psi^-_{N-1}>)/sqrt2
    const double edge = std::sqrt(double(truncation)) / std::numbers::sqrt2;
    const int col = WFrameMatrix::edge_index(truncation);
    a(WFrameMatrix::dressed_index({Branch::Plus, truncation - 1}, truncation), col) = edge;
    a(WFrameMatrix::dressed_index({Branch::Minus, truncation - 1}, truncation), col) = edge;
    return a;
}

WFrameMatrix to_w_frame(const DensityMatrix& rho, const DressedFrame& frame)
{
    require_resonance(frame);
    const int truncation = rho.truncation();
    const Eigen::MatrixXd u = dressed_basis(frame, truncation);
    const Eigen::VectorXd e = dressed_energies(frame, truncation);
    const Eigen::VectorXcd phase = (Complex(0.0, 1.0) * rho.time() * e.cast<Complex>()).array().exp();
    Eigen::MatrixXcd w = u.transpose().cast<Complex>() * rho.matrix() * u.cast<Complex>();
    w = phase.asDiagonal() * w * phase.conjugate().asDiagonal();
    return WFrameMatrix(std::move(w), truncation, rho.time());
}

DensityMatrix from_w_frame(const WFrameMatrix& w, const DressedFrame& frame)
{
    require_resonance(frame);
    const int truncation = w.truncation();
    const Eigen::MatrixXd u = dressed_basis(frame, truncation);
    const Eigen::VectorXd e = dressed_energies(frame, truncation);
    const Eigen::VectorXcd phase = (Complex(0.0, -1.0) * w.time() * e.cast<Complex>()).array().exp();
    const Eigen::MatrixXcd rotated = phase.asDiagonal() * w.matrix() * phase.conjugate().asDiagonal();
    Eigen::MatrixXcd rho = u.cast<Complex>() * rotated * u.transpose().cast<Complex>();
    return DensityMatrix(std::move(rho), truncation, w.time());
}

Eigen::MatrixXcd w_frame_rhs(const WFrameMatrix& w, const DressedFrame& frame,
                             const Dissipation& dissipation, bool secular)
{
    require_resonance(frame);
    const int truncation = w.truncation();
    const int dim = DensityMatrix::dimension(truncation);
    const Eigen::MatrixXd a = dressed_annihilation(frame, truncation);
    const Eigen::VectorXd e = dressed_energies(frame, truncation);
    const double t = w.time();
    const double loss = 2.0 * dissipation.kappa * (dissipation.n_thermal + 1.0);
    const double gain = 2.0 * dissipation.kappa * dissipation.n_thermal;
    const double resolution = 1e-9 * std::max(1.0, e.cwiseAbs().maxCoeff());
    const Eigen::MatrixXcd& W = w.matrix();

    struct Entry {
        int row;
        int col;
        double value;
    };
    std::vector<Entry> nz;
    for (int c = 0; c < dim; ++c)
        for (int r = 0; r < dim; ++r)
            if (a(r, c) != 0.0)
                nz.push_back({r, c, a(r, c)});

    auto oscillation = [&](double frequency) -> Complex {
        if (secular)
            return std::abs(frequency) < resolution ? Complex(1.0) : Complex(0.0);
        return std::polar(1.0, frequency * t);
    };

    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
    // Jump terms: a(t) W a(t)^* and a(t)^* W a(t), with a(t)_{pi} = a_{pi} e^{i(E_p - E_i)t}.
    for (const Entry& x : nz) {
        for (const Entry& y : nz) {
            if (loss != 0.0) {
                // (p, q) = (x.row, y.row), inner (i, j) = (x.col, y.col)
                const double freq = (e[x.row] - e[x.col]) - (e[y.row] - e[y.col]);
                out(x.row, y.row) += loss * x.value * y.value * W(x.col, y.col) * oscillation(freq);
            }
            if (gain != 0.0) {
                // (p, q) = (x.col, y.col), inner (i, j) = (x.row, y.row)
                const double freq = (e[x.col] - e[x.row]) + (e[y.row] - e[y.col]);
                out(x.col, y.col) += gain * x.value * y.value * W(x.row, y.row) * oscillation(freq);
            }
        }
    }
    // Anticommutator terms with n(t) = a(t)^* a(t) and m(t) = a(t) a(t)^*.
    Eigen::MatrixXcd generator = Eigen::MatrixXcd::Zero(dim, dim);
    for (const Entry& x : nz) {
        for (const Entry& y : nz) {
            if (x.row == y.row) // (a^* a)_{pk} = sum_i a_{ip} a_{ik}
                generator(x.col, y.col) += loss * x.value * y.value * oscillation(e[x.col] - e[y.col]);
            if (x.col == y.col) // (a a^*)_{pk} = sum_i a_{pi} a_{ki}
                generator(x.row, y.row) += gain * x.value * y.value * oscillation(e[x.row] - e[y.row]);
        }
    }
    out.noalias() -= 0.5 * (generator * W + W * generator);
    return out;
}

double WResidualReport::max() const
{
    return std::max({diagonal_upper, diagonal_lowest, offdiagonal_upper, offdiagonal_lowest});
}

WResidualReport w_equation_residuals(const std::vector<WFrameMatrix>& trajectory,
                                     const DressedFrame& frame, const Dissipation& dissipation,
                                     double dt, bool secular)
{
    if (trajectory.size() < 3)
        throw InvalidArgument("need at least three samples for centered differences");
    if (!(dt > 0.0))
        throw InvalidArgument("dt must be > 0");
    WResidualReport report;
    const int truncation = trajectory.front().truncation();
    for (const auto& w : trajectory)
        report.w_norm = std::max(report.w_norm, w.matrix().norm());

    for (std::size_t k = 1; k + 1 < trajectory.size(); ++k) {
        const Eigen::MatrixXcd derivative =
            (trajectory[k + 1].matrix() - trajectory[k - 1].matrix()) / (2.0 * dt);
        const Eigen::MatrixXcd residual =
            derivative - w_frame_rhs(trajectory[k], frame, dissipation, secular);
        for (int n = 0; n < truncation; ++n) {
            const int p = WFrameMatrix::dressed_index({Branch::Plus, n}, truncation);
            const int m = WFrameMatrix::dressed_index({Branch::Minus, n}, truncation);
            const double diag = std::max(std::abs(residual(p, p)), std::abs(residual(m, m)));
            const double off = std::max(std::abs(residual(p, m)), std::abs(residual(m, p)));
            double& diag_slot = n == 0 ? report.diagonal_lowest : report.diagonal_upper;
            double& off_slot = n == 0 ? report.offdiagonal_lowest : report.offdiagonal_upper;
            diag_slot = std::max(diag_slot, diag);
            off_slot = std::max(off_slot, off);
        }
    }
    return report;
}

double secular_mismatch(const std::vector<WFrameMatrix>& trajectory, const DressedFrame& frame,
                        const Dissipation& dissipation, double dt)
{
    if (trajectory.size() < 2)
        throw InvalidArgument("need at least two samples");
    if (!(dt > 0.0))
        throw InvalidArgument("dt must be > 0");
    const int truncation = trajectory.front().truncation();
    const Eigen::MatrixXcd& w0 = trajectory.front().matrix();
    double w_norm = 0.0;
    for (const auto& w : trajectory)
        w_norm = std::max(w_norm, w.matrix().norm());

    Eigen::MatrixXcd integral = Eigen::MatrixXcd::Zero(w0.rows(), w0.cols());
    Eigen::MatrixXcd previous = w_frame_rhs(trajectory.front(), frame, dissipation, true);
    double worst = 0.0;
    for (std::size_t k = 1; k < trajectory.size(); ++k) {
        const Eigen::MatrixXcd current = w_frame_rhs(trajectory[k], frame, dissipation, true);
        integral += 0.5 * dt * (previous + current);
        previous = current;
        const Eigen::MatrixXcd mismatch = trajectory[k].matrix() - w0 - integral;
        worst = std::max(worst, std::abs(mismatch(0, 0)));
        for (int n = 0; n < truncation; ++n) {
            const int p = WFrameMatrix::dressed_index({Branch::Plus, n}, truncation);
            worst = std::max({worst, std::abs(mismatch(p, p)), std::abs(mismatch(p + 1, p + 1)),
                              std::abs(mismatch(p, p + 1))});
        }
    }
    return worst / w_norm;
}

double branch_coherence_time(const CatSpec& cat, const JCParams& jc, const DampingParams& damping,
                             int truncation, int samples)
{
    if (samples < 2)
        throw InvalidArgument("need at least two samples per decoherence time");
    const double scale =
        damping.t_cav() / (cat_mean_photons(cat) * (1.0 + damping.n_thermal()));
    const double dt = scale / samples;
    const LindbladGenerator generator(jc, Dissipation(damping), truncation);
    const BlockPropagator propagator(generator);
    const auto stepper = propagator.stepper(dt);

    Eigen::MatrixXcd x = cat_cross_term(cat, truncation);
    const double target = std::log(trace_norm(x)) - 1.0;
    double previous = target + 1.0;
    for (int k = 1; k <= 20 * samples; ++k) {
        stepper.advance(x);
        const double current = std::log(trace_norm(x));
        if (current <= target)
            return dt * ((k - 1) + (previous - target) / (previous - current));
        previous = current;
    }
    throw ConsistencyError("branch coherence did not decay by 1/e");
}

// ---------------------------------------------------------------------------
// Observables

OracleSnapshot oracle_observables(const DensityMatrix& rho, const DressedFrame& frame)
{
    const int truncation = rho.truncation();
    const auto& m = rho.matrix();
    OracleSnapshot s;
    s.time = rho.time();
    s.trace = rho.trace().real();
    s.field_excited.resize(truncation + 1);
    s.field_ground.resize(truncation + 1);
    for (int n = 0; n <= truncation; ++n) {
        s.field_excited[n] = m(DensityMatrix::index(n, AtomLevel::Excited), DensityMatrix::index(n, AtomLevel::Excited)).real();
        s.field_ground[n] = m(DensityMatrix::index(n, AtomLevel::Ground), DensityMatrix::index(n, AtomLevel::Ground)).real();
    }
    s.p_excited = s.field_excited.sum();
    // F_n is the trace over doublet n, so it needs no frame rotation.
    s.f.resize(truncation);
    for (int n = 0; n < truncation; ++n)
        s.f[n] = s.field_excited[n] + s.field_ground[n + 1];
    s.f_ground = 2.0 * s.field_ground[0];
    if (frame.resonant()) {
        const WFrameMatrix w = to_w_frame(rho, frame);
        s.offdiag.resize(truncation);
        for (int n = 0; n < truncation; ++n)
            s.offdiag[n] = w.plus_minus(n);
    }
    return s;
}

std::vector<OracleSnapshot> oracle_observables(const std::vector<DensityMatrix>& trajectory,
                                               const DressedFrame& frame)
{
    std::vector<OracleSnapshot> out;
    out.reserve(trajectory.size());
    for (const auto& rho : trajectory)
        out.push_back(oracle_observables(rho, frame));
    return out;
}

DensityMatrix condition_and_reinject(const DensityMatrix& rho, AtomLevel outcome)
{
    return tensor_excited_atom(rho.field_block(outcome), rho.time());
}

void write_trajectory_dump(std::ostream& out, const std::vector<OracleSnapshot>& snapshots)
{
    const auto old_precision = out.precision(12);
    for (const auto& s : snapshots) {
        out << s.time << ", trace, " << s.trace << '\n';
        out << s.time << ", P_plus, " << s.p_excited << '\n';
        out << s.time << ", F_ground, " << s.f_ground << '\n';
        for (Eigen::Index n = 0; n < s.f.size(); ++n)
            out << s.time << ", F_" << n << ", " << s.f[n] << '\n';
        for (Eigen::Index n = 0; n < s.offdiag.size(); ++n) {
            out << s.time << ", offdiag_re_" << n << ", " << s.offdiag[n].real() << '\n';
            out << s.time << ", offdiag_im_" << n << ", " << s.offdiag[n].imag() << '\n';
        }
    }
    out.precision(old_precision);
}

} // namespace cavcat::oracle

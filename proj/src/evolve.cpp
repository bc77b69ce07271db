#include "rydvqe/evolve.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <string>

namespace rydvqe {

namespace {

constexpr double kNsToUs = 1e-3;

double ramp(const Breakpoint& a, const Breakpoint& b, double va, double vb, double t) {
    const auto ta = static_cast<double>(a.t_ns);
    const auto tb = static_cast<double>(b.t_ns);
    return ((tb - t) * va + (t - ta) * vb) / (tb - ta);
}

double omega_at(const Breakpoint& a, const Breakpoint& b, double t) {
    return ramp(a, b, a.omega, b.omega, t);
}

double delta_at(const Breakpoint& a, const Breakpoint& b, double t) {
    return ramp(a, b, a.delta, b.delta, t);
}

// k = -i c s
inline void times_minus_i(std::size_t d, double c, const double* __restrict sre, const double* __restrict sim,
                          double* __restrict kre, double* __restrict kim) {
    for (std::size_t i = 0; i < d; ++i) {
        kre[i] = c * sim[i];
        kim[i] = -c * sre[i];
    }
}

// out = x + a y
inline void axpy(std::size_t d, const double* __restrict xre, const double* __restrict xim, double a,
                 const double* __restrict yre, const double* __restrict yim, double* __restrict ore,
                 double* __restrict oim) {
    for (std::size_t i = 0; i < d; ++i) {
        ore[i] = xre[i] + a * yre[i];
        oim[i] = xim[i] + a * yim[i];
    }
}

// out = p (.) x, elementwise complex product (out may alias x)
inline void diag_mul(std::size_t d, const double* __restrict pre, const double* __restrict pim, const double* xre,
                     const double* xim, double* ore, double* oim) {
    for (std::size_t i = 0; i < d; ++i) {
        const double r = pre[i] * xre[i] - pim[i] * xim[i];
        const double m = pre[i] * xim[i] + pim[i] * xre[i];
        ore[i] = r;
        oim[i] = m;
    }
}

std::vector<double> full_space_interaction(const Eigen::MatrixXd& jmat) {
    const auto n = static_cast<int>(jmat.rows());
    const std::size_t d = std::size_t{1} << n;
    std::vector<double> v(d, 0.0);
    for (std::uint64_t b = 1; b < d; ++b) {
        const int low = std::countr_zero(b);
        const std::uint64_t rest = b & (b - 1);
        double add = 0.0;
        for (int j = low + 1; j < n; ++j) {
            if ((rest >> j) & 1U) {
                add += jmat(low, j);
            }
        }
        v[b] = v[rest] + add;
    }
    return v;
}

}  // namespace

DriveOperator DriveOperator::full_space(const Eigen::MatrixXd& jmat) {
    if (jmat.rows() != jmat.cols() || jmat.rows() < 1 || jmat.rows() > 24) {
        throw ValidationError("interaction matrix must be square with 1..24 sites");
    }
    DriveOperator op;
    op.n_qubits_ = static_cast<int>(jmat.rows());
    op.interaction_ = full_space_interaction(jmat);
    op.excitations_.resize(op.interaction_.size());
    for (std::uint64_t b = 0; b < op.interaction_.size(); ++b) {
        op.excitations_[b] = std::popcount(b);
    }
    return op;
}

DriveOperator DriveOperator::in_sector(std::shared_ptr<const SymmetrySector> sector,
                                       std::shared_ptr<const CsrMatrix> flip_sum, const Eigen::MatrixXd& jmat) {
    if (!sector || !flip_sum || flip_sum->rows != sector->dim()) {
        throw ValidationError("sector drive operator needs a matching flip-sum matrix");
    }
    const int n = sector->n_sites();
    if (jmat.rows() != n || jmat.cols() != n) {
        throw ValidationError("interaction matrix does not match the sector size");
    }
    DriveOperator op;
    op.n_qubits_ = n;
    for (const std::uint64_t rep : sector->representatives()) {
        double v = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!((rep >> i) & 1U)) {
                continue;
            }
            for (int j = i + 1; j < n; ++j) {
                if ((rep >> j) & 1U) {
                    v += jmat(i, j);
                }
            }
        }
        op.interaction_.push_back(v);
        op.excitations_.push_back(std::popcount(rep));
    }
    op.sector_ = std::move(sector);
    op.flip_sum_ = std::move(flip_sum);
    return op;
}

void DriveOperator::apply_flip_sum(const double* in_re, const double* in_im, double* out_re, double* out_im) const {
    const std::size_t d = dim();
    if (flip_sum_) {
        const auto& m = *flip_sum_;
        for (std::size_t r = 0; r < d; ++r) {
            double sr = 0.0;
            double si = 0.0;
            for (std::size_t k = m.row_start[r]; k < m.row_start[r + 1]; ++k) {
                sr += m.val[k] * in_re[m.col[k]];
                si += m.val[k] * in_im[m.col[k]];
            }
            out_re[r] = sr;
            out_im[r] = si;
        }
        return;
    }
    for (std::size_t i = 0; i < d; ++i) {
        out_re[i] = 0.0;
        out_im[i] = 0.0;
    }
    for (int j = 0; j < n_qubits_; ++j) {
        const std::size_t st = std::size_t{1} << j;
        for (std::size_t base = 0; base < d; base += 2 * st) {
            double* __restrict ore_lo = out_re + base;
            double* __restrict oim_lo = out_im + base;
            double* __restrict ore_hi = out_re + base + st;
            double* __restrict oim_hi = out_im + base + st;
            const double* __restrict ire_lo = in_re + base;
            const double* __restrict iim_lo = in_im + base;
            const double* __restrict ire_hi = in_re + base + st;
            const double* __restrict iim_hi = in_im + base + st;
            for (std::size_t k = 0; k < st; ++k) {
                ore_lo[k] += ire_hi[k];
                oim_lo[k] += iim_hi[k];
                ore_hi[k] += ire_lo[k];
                oim_hi[k] += iim_lo[k];
            }
        }
    }
}

Propagator::Propagator(DriveOperator op, EvolveOptions opts) : op_(std::move(op)), opts_(opts) {
    if (!(opts_.step_ns > 0.0) || !std::isfinite(opts_.step_ns)) {
        throw ValidationError("step_ns must be positive");
    }
    const std::size_t d = op_.dim();
    for (auto* v : {&re_, &im_, &ure_, &uim_, &are_, &aim_, &bre_, &bim_, &kre_, &kim_, &sre_, &sim_, &p1re_,
                    &p1im_, &p2re_, &p2im_, &vphase_re_, &vphase_im_}) {
        v->assign(d, 0.0);
    }
}

void Propagator::load(const std::vector<cplx>& coeffs) {
    if (coeffs.size() != op_.dim()) {
        throw ValidationError("coefficient vector does not match the propagator dimension");
    }
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        re_[i] = coeffs[i].real();
        im_[i] = coeffs[i].imag();
    }
}

void Propagator::store(std::vector<cplx>& coeffs) const {
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        coeffs[i] = {re_[i], im_[i]};
    }
}

void Propagator::prepare_step_phases(double h_us) {
    if (h_us == cached_h_) {
        return;
    }
    cached_h_ = h_us;
    const auto& v = op_.interaction();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double phi = -0.5 * h_us * v[i];
        vphase_re_[i] = std::cos(phi);
        vphase_im_[i] = std::sin(phi);
    }
}

void Propagator::step_interaction(double t0, double h, const Breakpoint& from, const Breakpoint& to) {
    const std::size_t d = op_.dim();
    const double hu = h * kNsToUs;
    const double c0 = 0.5 * omega_at(from, to, t0);
    const double cm = 0.5 * omega_at(from, to, t0 + 0.5 * h);
    const double c1 = 0.5 * omega_at(from, to, t0 + h);

    // Exact diagonal propagators for [t0, t0 + h/2] and [t0 + h/2, t0 + h]:
    // exp(-i V h/2) exp(+i n int Delta), with int Delta exact for a ramp.
    prepare_step_phases(hu);
    const double i1 = 0.5 * hu * delta_at(from, to, t0 + 0.25 * h);
    const double i2 = 0.5 * hu * delta_at(from, to, t0 + 0.75 * h);
    std::array<cplx, 33> w1pow{};
    std::array<cplx, 33> w2pow{};
    const cplx w1 = std::polar(1.0, i1);
    const cplx w2 = std::polar(1.0, i2);
    w1pow[0] = w2pow[0] = 1.0;
    for (int k = 1; k <= op_.n_qubits(); ++k) {
        w1pow[k] = w1pow[k - 1] * w1;
        w2pow[k] = w2pow[k - 1] * w2;
    }
    const auto& nexc = op_.excitations();
    for (std::size_t i = 0; i < d; ++i) {
        const cplx a = w1pow[nexc[i]];
        const cplx b = w2pow[nexc[i]];
        p1re_[i] = vphase_re_[i] * a.real() - vphase_im_[i] * a.imag();
        p1im_[i] = vphase_re_[i] * a.imag() + vphase_im_[i] * a.real();
        p2re_[i] = vphase_re_[i] * b.real() - vphase_im_[i] * b.imag();
        p2im_[i] = vphase_re_[i] * b.imag() + vphase_im_[i] * b.real();
    }

    double* psr = re_.data();
    double* psi = im_.data();
    if (c0 == 0.0 && cm == 0.0 && c1 == 0.0) {
        diag_mul(d, p1re_.data(), p1im_.data(), psr, psi, psr, psi);
        diag_mul(d, p2re_.data(), p2im_.data(), psr, psi, psr, psi);
        return;
    }

    // k1 = -i c0 S psi ; u = P1 psi ; k1m = P1 k1 (kept in b as the running sum)
    op_.apply_flip_sum(psr, psi, sre_.data(), sim_.data());
    times_minus_i(d, c0, sre_.data(), sim_.data(), kre_.data(), kim_.data());
    diag_mul(d, p1re_.data(), p1im_.data(), psr, psi, ure_.data(), uim_.data());
    diag_mul(d, p1re_.data(), p1im_.data(), kre_.data(), kim_.data(), bre_.data(), bim_.data());

    // k2 = -i cm S (u + h/2 k1m)
    axpy(d, ure_.data(), uim_.data(), 0.5 * hu, bre_.data(), bim_.data(), are_.data(), aim_.data());
    op_.apply_flip_sum(are_.data(), aim_.data(), sre_.data(), sim_.data());
    times_minus_i(d, cm, sre_.data(), sim_.data(), kre_.data(), kim_.data());
    for (std::size_t i = 0; i < d; ++i) {
        bre_[i] += 2.0 * kre_[i];
        bim_[i] += 2.0 * kim_[i];
    }

    // k3 = -i cm S (u + h/2 k2)
    axpy(d, ure_.data(), uim_.data(), 0.5 * hu, kre_.data(), kim_.data(), are_.data(), aim_.data());
    op_.apply_flip_sum(are_.data(), aim_.data(), sre_.data(), sim_.data());
    times_minus_i(d, cm, sre_.data(), sim_.data(), kre_.data(), kim_.data());
    for (std::size_t i = 0; i < d; ++i) {
        bre_[i] += 2.0 * kre_[i];
        bim_[i] += 2.0 * kim_[i];
    }

    // k4 = -i c1 S P2 (u + h k3)
    axpy(d, ure_.data(), uim_.data(), hu, kre_.data(), kim_.data(), are_.data(), aim_.data());
    diag_mul(d, p2re_.data(), p2im_.data(), are_.data(), aim_.data(), are_.data(), aim_.data());
    op_.apply_flip_sum(are_.data(), aim_.data(), sre_.data(), sim_.data());
    times_minus_i(d, c1, sre_.data(), sim_.data(), kre_.data(), kim_.data());

    // psi = P2 (u + h/6 (k1m + 2 k2 + 2 k3)) + h/6 k4
    axpy(d, ure_.data(), uim_.data(), hu / 6.0, bre_.data(), bim_.data(), are_.data(), aim_.data());
    diag_mul(d, p2re_.data(), p2im_.data(), are_.data(), aim_.data(), are_.data(), aim_.data());
    axpy(d, are_.data(), aim_.data(), hu / 6.0, kre_.data(), kim_.data(), psr, psi);
}

void Propagator::step_lab(double t0, double h, const Breakpoint& from, const Breakpoint& to) {
    const std::size_t d = op_.dim();
    const double hu = h * kNsToUs;
    const auto& v = op_.interaction();
    const auto& nexc = op_.excitations();

    // k = -i H(t) x
    auto deriv = [&](double t, const double* xre, const double* xim, double* ore, double* oim) {
        const double c = 0.5 * omega_at(from, to, t);
        const double dl = delta_at(from, to, t);
        op_.apply_flip_sum(xre, xim, sre_.data(), sim_.data());
        for (std::size_t i = 0; i < d; ++i) {
            const double e = v[i] - dl * nexc[i];
            const double hr = e * xre[i] + c * sre_[i];
            const double hi = e * xim[i] + c * sim_[i];
            ore[i] = hi;
            oim[i] = -hr;
        }
    };

    double* psr = re_.data();
    double* psi = im_.data();
    deriv(t0, psr, psi, kre_.data(), kim_.data());
    for (std::size_t i = 0; i < d; ++i) {
        bre_[i] = kre_[i];
        bim_[i] = kim_[i];
    }
    axpy(d, psr, psi, 0.5 * hu, kre_.data(), kim_.data(), are_.data(), aim_.data());
    deriv(t0 + 0.5 * h, are_.data(), aim_.data(), kre_.data(), kim_.data());
    for (std::size_t i = 0; i < d; ++i) {
        bre_[i] += 2.0 * kre_[i];
        bim_[i] += 2.0 * kim_[i];
    }
    axpy(d, psr, psi, 0.5 * hu, kre_.data(), kim_.data(), are_.data(), aim_.data());
    deriv(t0 + 0.5 * h, are_.data(), aim_.data(), kre_.data(), kim_.data());
    for (std::size_t i = 0; i < d; ++i) {
        bre_[i] += 2.0 * kre_[i];
        bim_[i] += 2.0 * kim_[i];
    }
    axpy(d, psr, psi, hu, kre_.data(), kim_.data(), are_.data(), aim_.data());
    deriv(t0 + h, are_.data(), aim_.data(), kre_.data(), kim_.data());
    for (std::size_t i = 0; i < d; ++i) {
        psr[i] += hu / 6.0 * (bre_[i] + kre_[i]);
        psi[i] += hu / 6.0 * (bim_[i] + kim_[i]);
    }
}

void Propagator::propagate_segment(std::vector<cplx>& coeffs, const Breakpoint& from, const Breakpoint& to) {
    if (to.t_ns <= from.t_ns) {
        throw ValidationError("segment end must follow its start");
    }
    load(coeffs);
    const auto duration = static_cast<double>(to.t_ns - from.t_ns);
    const auto steps = static_cast<std::size_t>(std::ceil(duration / opts_.step_ns - 1e-9));
    const double h = duration / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const double t0 = static_cast<double>(from.t_ns) + h * static_cast<double>(k);
        if (opts_.frame == Frame::Interaction) {
            step_interaction(t0, h, from, to);
        } else {
            step_lab(t0, h, from, to);
        }
    }
    steps_taken_ += steps;
    store(coeffs);
}

void Propagator::evolve(std::vector<cplx>& coeffs, const PulseSequence& seq) {
    double n0 = 0.0;
    for (const auto& c : coeffs) {
        n0 += std::norm(c);
    }
    if (std::abs(std::sqrt(n0) - 1.0) > 1e-6) {
        throw ValidationError("initial state is not normalized");
    }
    steps_taken_ = 0;
    const auto& bp = seq.breakpoints();
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        propagate_segment(coeffs, bp[i], bp[i + 1]);
    }
    double n1 = 0.0;
    for (const auto& c : coeffs) {
        n1 += std::norm(c);
    }
    const double drift = std::abs(std::sqrt(n1) - std::sqrt(n0));
    if (!(drift <= opts_.drift_tolerance)) {
        throw IntegrationError("norm drift " + std::to_string(drift) + " exceeds " +
                               std::to_string(opts_.drift_tolerance) + " after " + std::to_string(steps_taken_) +
                               " steps of " + std::to_string(opts_.step_ns) + " ns over " +
                               std::to_string(seq.segment_count()) + " segments; reduce step_ns");
    }
}

StateVector propagate_segment(const StateVector& psi, const Breakpoint& from, const Breakpoint& to,
                              const Eigen::MatrixXd& jmat, const EvolveOptions& opts) {
    if (jmat.rows() != psi.n_qubits()) {
        throw ValidationError("interaction matrix does not match the state size");
    }
    Propagator p(DriveOperator::full_space(jmat), opts);
    std::vector<cplx> c(psi.amplitudes().begin(), psi.amplitudes().end());
    p.propagate_segment(c, from, to);
    return StateVector(psi.n_qubits(), std::move(c));
}

StateVector evolve(const PulseSequence& seq, const StateVector& initial, const Eigen::MatrixXd& jmat,
                   const EvolveOptions& opts) {
    if (jmat.rows() != initial.n_qubits()) {
        throw ValidationError("interaction matrix does not match the state size");
    }
    Propagator p(DriveOperator::full_space(jmat), opts);
    std::vector<cplx> c(initial.amplitudes().begin(), initial.amplitudes().end());
    p.evolve(c, seq);
    return StateVector(initial.n_qubits(), std::move(c));
}

}  // namespace rydvqe

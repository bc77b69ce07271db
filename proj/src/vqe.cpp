#include "rydvqe/vqe.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "rydvqe/ed.hpp"
#include "rydvqe/measure.hpp"

namespace rydvqe {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (const double x : v) {
        s += x;
    }
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) {
        return 0.0;
    }
    const double m = mean_of(v);
    double ss = 0.0;
    for (const double x : v) {
        ss += (x - m) * (x - m);
    }
    return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

Box parameter_box(const VqeConfig& cfg, std::size_t breakpoints) {
    Box b;
    const auto& c = cfg.constants;
    for (std::size_t i = 0; i < breakpoints; ++i) {
        b.lo.push_back(c.omega_bounds.lo);
        b.hi.push_back(c.omega_bounds.hi);
    }
    for (std::size_t i = 0; i < breakpoints; ++i) {
        b.lo.push_back(c.delta_bounds.lo);
        b.hi.push_back(c.delta_bounds.hi);
    }
    if (cfg.variable_radius) {
        const Interval r = cfg.effective_radius_bounds();
        b.lo.push_back(r.lo / cfg.radius_scale);
        b.hi.push_back(r.hi / cfg.radius_scale);
    }
    return b;
}

std::vector<double> to_scaled(std::vector<double> theta, const VqeConfig& cfg) {
    if (cfg.variable_radius) {
        theta.back() /= cfg.radius_scale;
    }
    return theta;
}

std::vector<double> from_scaled(std::vector<double> z, const VqeConfig& cfg) {
    if (cfg.variable_radius) {
        z.back() *= cfg.radius_scale;
    }
    return z;
}

}  // namespace

Interval VqeConfig::effective_radius_bounds() const {
    const double floor = min_ring_radius(n_atoms(), constants);
    return {std::max(radius_bounds.lo, floor), radius_bounds.hi};
}

void VqeConfig::validate() const {
    target.validate();
    constants.validate();
    if (total_duration_ns <= constants.min_segment_ns || total_duration_ns % constants.clock_period_ns != 0) {
        throw ValidationError("vqe.total_duration_ns must be a clock multiple longer than the minimum segment");
    }
    if (!(error_threshold_percent > 0.0)) {
        throw ValidationError("vqe.error_threshold_percent must be positive");
    }
    if (max_segments < 1) {
        throw ValidationError("vqe.max_segments must be at least 1");
    }
    if (max_iter < 1) {
        throw ValidationError("vqe.max_iter must be at least 1");
    }
    if (!(step_ns > 0.0)) {
        throw ValidationError("vqe.step_ns must be positive");
    }
    if (!(radius_scale > 0.0)) {
        throw ValidationError("vqe.radius_scale must be positive");
    }
    if (optimizer == OptimizerKind::LbfgsbFd && !(fd_step > 0.0)) {
        throw ValidationError("vqe.fd_step must be positive");
    }
    if (variable_radius) {
        const Interval r = effective_radius_bounds();
        if (!(r.lo < r.hi)) {
            throw ValidationError("geometry.radius_bounds is empty above the spacing floor");
        }
        if (init_radius && !(init_radius->lo <= init_radius->hi && init_radius->lo >= r.lo && init_radius->hi <= r.hi)) {
            throw ValidationError("geometry.init_radius must lie inside geometry.radius_bounds");
        }
    } else {
        RingGeometry(n_atoms(), fixed_radius_um).check_spacing(constants);
    }
    if (initial_state == InitialState::QPi && n_atoms() % 2 != 0) {
        throw ValidationError("vqe.initial_state q_pi needs an even number of sites");
    }
    if (initial_state == InitialState::Custom) {
        if (!custom_state || custom_state->n_qubits() != n_atoms()) {
            throw ValidationError("vqe.initial_state custom needs a state of matching size");
        }
        if (std::abs(custom_state->norm() - 1.0) > 1e-10) {
            throw ValidationError("vqe.custom_state must be normalized");
        }
    }
}

StateVector initial_state(const VqeConfig& cfg) {
    switch (cfg.initial_state) {
        case InitialState::ProductG:
            return StateVector(cfg.n_atoms());
        case InitialState::QPi:
            return prepare_q_pi(cfg.n_atoms());
        case InitialState::Custom:
            if (!cfg.custom_state) {
                throw ValidationError("custom initial state missing");
            }
            return *cfg.custom_state;
    }
    throw ValidationError("unknown initial state");
}

double relative_error(double energy, double ground_energy) {
    if (ground_energy == 0.0) {
        throw ValidationError("relative error is undefined for a zero ground energy");
    }
    return 100.0 * std::abs(energy - ground_energy) / std::abs(ground_energy);
}

CostFunction::CostFunction(const VqeConfig& cfg) : cfg_(cfg), initial_(initial_state(cfg)) {
    cfg_.validate();
    if (cfg_.use_symmetry) {
        if (const auto label = SymmetrySector::detect(initial_, 1e-12)) {
            auto s = std::make_shared<SymmetrySector>(cfg_.n_atoms(), *label);
            flip_sum_ = std::make_shared<CsrMatrix>(restricted_flip_sum(*s));
            initial_coeffs_ = s->project(initial_);
            sector_ = std::move(s);
        }
    }
}

double CostFunction::radius_for(std::span<const double> theta) const {
    return cfg_.variable_radius ? theta.back() : cfg_.fixed_radius_um;
}

StateVector CostFunction::final_state(std::span<const double> theta, std::span<const std::int64_t> times) const {
    const Unpacked u = unpack(theta, times, cfg_.variable_radius, cfg_.constants);
    const RingGeometry ring(cfg_.n_atoms(), radius_for(theta));
    ring.check_spacing(cfg_.constants);
    const Eigen::MatrixXd jmat = interaction_matrix(ring, cfg_.constants);
    const EvolveOptions opts{cfg_.step_ns, cfg_.frame, 1e-6};
    if (sector_) {
        Propagator p(DriveOperator::in_sector(sector_, flip_sum_, jmat), opts);
        std::vector<cplx> c = initial_coeffs_;
        p.evolve(c, u.sequence);
        return sector_->embed(c);
    }
    return evolve(u.sequence, initial_, jmat, opts);
}

double CostFunction::evaluate(std::span<const double> theta, std::span<const std::int64_t> times) const {
    try {
        const double e = expectation(final_state(theta, times), cfg_.target);
        return std::isfinite(e) ? e : cfg_.penalty;
    } catch (const ValidationError&) {
        return cfg_.penalty;
    } catch (const IntegrationError&) {
        return cfg_.penalty;
    }
}

double CostFunction::evaluate_scaled(std::span<const double> z, std::span<const std::int64_t> times) const {
    std::vector<double> theta(z.begin(), z.end());
    return evaluate(from_scaled(std::move(theta), cfg_), times);
}

double cost(std::span<const double> theta, std::span<const std::int64_t> times, const VqeConfig& cfg) {
    return CostFunction(cfg).evaluate(theta, times);
}

std::optional<double> oracle_ground_energy(const TargetHamiltonian& h) {
    if (h.n_sites > kMaxDenseSites) {
        return std::nullopt;
    }
    return dense_ground_state(h).energy;
}

RunRecord adaptive_run(const VqeConfig& cfg, Rng& rng) {
    return adaptive_run(cfg, rng, oracle_ground_energy(cfg.target));
}

RunRecord adaptive_run(const VqeConfig& cfg, Rng& rng, std::optional<double> ground_energy) {
    const auto start = std::chrono::steady_clock::now();
    cfg.validate();
    const CostFunction cf(cfg);
    const auto& c = cfg.constants;

    RunRecord rec;
    rec.config = cfg;
    rec.seed = rng.seed();
    rec.generator = std::string(Rng::kGeneratorName);
    rec.ground_energy = ground_energy;

    // First-stage draws, in this order: Omega_0, Omega_1, Delta_0, Delta_1, R.
    const double o0 = rng.uniform(c.omega_bounds.lo, c.omega_bounds.hi);
    const double o1 = rng.uniform(c.omega_bounds.lo, c.omega_bounds.hi);
    const double d0 = rng.uniform(c.delta_bounds.lo, c.delta_bounds.hi);
    const double d1 = rng.uniform(c.delta_bounds.lo, c.delta_bounds.hi);
    std::optional<double> radius;
    if (cfg.variable_radius) {
        const Interval r = cfg.init_radius.value_or(cfg.effective_radius_bounds());
        radius = rng.uniform(r.lo, r.hi);
    }
    PulseSequence seq = linear_schedule(o0, o1, d0, d1, cfg.total_duration_ns, c);
    std::vector<double> theta = pack(seq, radius).values;
    rec.initial_theta = theta;

    std::optional<SplitInfo> pending_split;
    std::size_t cum_iter = 0;
    std::size_t cum_eval = 0;
    for (std::size_t stage = 1;; ++stage) {
        const std::vector<std::int64_t> times = seq.times();
        const Box box = parameter_box(cfg, times.size());
        const Objective f = [&cf, &times](std::span<const double> z) { return cf.evaluate_scaled(z, times); };
        OptimizeResult res;
        if (cfg.optimizer == OptimizerKind::NelderMead) {
            NelderMeadOptions o;
            o.max_iter = cfg.max_iter;
            o.x_tol = cfg.x_tol;
            o.f_tol = cfg.f_tol;
            res = nelder_mead(f, to_scaled(theta, cfg), box, o);
        } else {
            LbfgsbOptions o;
            o.max_iter = cfg.max_iter;
            o.fd_step = cfg.fd_step;
            res = lbfgsb_fd(f, to_scaled(theta, cfg), box, o);
        }
        theta = from_scaled(res.x, cfg);
        seq = unpack(theta, times, cfg.variable_radius, c).sequence;
        cum_iter += res.iterations;
        cum_eval += res.evaluations;

        StageRecord st;
        st.stage = stage;
        st.segments = seq.segment_count();
        st.times = times;
        st.theta = theta;
        st.energy = res.f;
        if (ground_energy) {
            st.eta_err_percent = relative_error(res.f, *ground_energy);
        }
        st.iterations = res.iterations;
        st.cumulative_iterations = cum_iter;
        st.evaluations = res.evaluations;
        st.cumulative_evaluations = cum_eval;
        st.converged = res.converged;
        st.radius_um = cf.radius_for(theta);
        st.split = pending_split;
        rec.stages.push_back(st);

        if (st.eta_err_percent && *st.eta_err_percent < cfg.error_threshold_percent) {
            rec.stop_reason = "threshold";
            break;
        }
        if (seq.segment_count() >= cfg.max_segments) {
            rec.stop_reason = "max_segments";
            break;
        }
        auto split = random_split(seq, rng, c);
        if (!split) {
            rec.stop_reason = "saturated";
            break;
        }
        seq = std::move(split->sequence);
        pending_split = split->info;
        theta = pack(seq, cfg.variable_radius ? std::optional<double>(st.radius_um) : std::nullopt).values;
    }
    rec.final_sequence = seq;
    rec.final_radius_um = rec.stages.back().radius_um;
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

EnsembleStats summarize(const std::vector<RunRecord>& runs) {
    EnsembleStats s;
    s.completed = runs.size();
    if (runs.empty()) {
        return s;
    }
    bool all_errors = true;
    for (const auto& r : runs) {
        s.final_energies.push_back(r.last().energy);
        s.final_radii.push_back(r.final_radius_um);
        if (r.last().eta_err_percent) {
            s.final_errors.push_back(*r.last().eta_err_percent);
        } else {
            all_errors = false;
        }
    }
    if (!all_errors) {
        s.final_errors.clear();
    }
    s.mean_energy = mean_of(s.final_energies);
    s.stderr_energy = stderr_of(s.final_energies);
    s.mean_error = mean_of(s.final_errors);
    s.stderr_error = stderr_of(s.final_errors);
    s.mean_radius = mean_of(s.final_radii);
    s.stderr_radius = stderr_of(s.final_radii);
    const auto& key = s.final_errors.empty() ? s.final_energies : s.final_errors;
    const auto best = static_cast<std::size_t>(std::min_element(key.begin(), key.end()) - key.begin());
    s.best_run = runs[best].run_index;
    s.nn_ising_mhz_at_mean_radius =
        nn_ising_mhz(RingGeometry(runs.front().config.n_atoms(), s.mean_radius), runs.front().config.constants);
    return s;
}

EnsembleResult ensemble(const VqeConfig& cfg, std::size_t n_runs, std::uint64_t base_seed, std::size_t parallel) {
    if (n_runs < 1) {
        throw ValidationError("ensemble needs at least one run");
    }
    cfg.validate();
    const std::optional<double> e_gs = oracle_ground_energy(cfg.target);
    std::vector<std::optional<RunRecord>> slots(n_runs);
    std::vector<std::string> errors(n_runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < n_runs; k = next++) {
            try {
                VqeConfig ck = cfg;
                ck.seed = derive_seed(base_seed, k);
                Rng rng(ck.seed);
                RunRecord r = adaptive_run(ck, rng, e_gs);
                r.run_index = k;
                slots[k] = std::move(r);
            } catch (const std::exception& e) {
                errors[k] = "run " + std::to_string(k) + ": " + e.what();
            }
        }
    };
    const std::size_t p = std::clamp<std::size_t>(parallel, 1, n_runs);
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < p; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    EnsembleResult out;
    for (std::size_t k = 0; k < n_runs; ++k) {
        if (slots[k]) {
            out.runs.push_back(std::move(*slots[k]));
        } else {
            out.failures.push_back(errors[k]);
        }
    }
    out.stats = summarize(out.runs);
    return out;
}

}  // namespace rydvqe

#include "rydvqe/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "rydvqe/geometry.hpp"

namespace rydvqe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Counts calls and maps NaN to +inf so comparisons stay total.
class Counted {
public:
    explicit Counted(const Objective& f) : f_(f) {}

    double operator()(std::span<const double> x) {
        ++calls;
        const double v = f_(x);
        return std::isnan(v) ? kInf : v;
    }

    std::size_t calls = 0;

private:
    const Objective& f_;
};

double first_value(Counted& f, std::span<const double> x0) {
    const double v = f(x0);
    if (!std::isfinite(v)) {
        throw ValidationError("objective is not finite at the starting point");
    }
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

void Box::clip(std::span<double> x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = std::clamp(x[i], lo[i], hi[i]);
    }
}

void Box::validate(std::size_t n) const {
    if (lo.size() != n || hi.size() != n) {
        throw ValidationError("bounds have " + std::to_string(lo.size()) + " / " + std::to_string(hi.size()) +
                              " entries for " + std::to_string(n) + " coordinates");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lo[i] <= hi[i])) {
            throw ValidationError("bounds[" + std::to_string(i) + "] has lo > hi");
        }
    }
}

OptimizeResult nelder_mead(const Objective& objective, std::vector<double> x0, const Box& box,
                           const NelderMeadOptions& opts) {
    const std::size_t n = x0.size();
    if (n == 0) {
        throw ValidationError("nelder_mead needs at least one coordinate");
    }
    box.validate(n);
    box.clip(x0);
    Counted f(objective);

    std::vector<std::vector<double>> sim(n + 1, x0);
    std::vector<double> fs(n + 1);
    fs[0] = first_value(f, x0);
    for (std::size_t k = 0; k < n; ++k) {
        auto& v = sim[k + 1];
        const double step = x0[k] != 0.0 ? opts.initial_rel_step * x0[k] : opts.initial_zero_step;
        v[k] = x0[k] + step;
        if (v[k] > box.hi[k] || v[k] < box.lo[k]) {
            v[k] = x0[k] - step;
        }
        box.clip(v);
        fs[k + 1] = f(v);
    }

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        std::vector<std::vector<double>> s2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            s2[i] = std::move(sim[order[i]]);
            f2[i] = fs[order[i]];
        }
        sim = std::move(s2);
        fs = std::move(f2);
    };

    auto propose = [&](const std::vector<double>& xbar, double coef) {
        std::vector<double> p(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = xbar[i] + coef * (xbar[i] - sim[n][i]);
        }
        box.clip(p);
        return p;
    };

    OptimizeResult out;
    sort_simplex();
    std::vector<double> xbar(n);
    while (out.iterations < opts.max_iter) {
        double xs = 0.0;
        double fsp = 0.0;
        for (std::size_t k = 1; k <= n; ++k) {
            fsp = std::max(fsp, std::abs(fs[k] - fs[0]));
            for (std::size_t i = 0; i < n; ++i) {
                xs = std::max(xs, std::abs(sim[k][i] - sim[0][i]));
            }
        }
        if (xs <= opts.x_tol && fsp <= opts.f_tol) {
            out.converged = true;
            break;
        }

        std::fill(xbar.begin(), xbar.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                xbar[i] += sim[k][i];
            }
        }
        for (auto& v : xbar) {
            v /= static_cast<double>(n);
        }

        auto xr = propose(xbar, 1.0);
        const double fr = f(xr);
        bool shrink = false;
        if (fr < fs[0]) {
            auto xe = propose(xbar, 2.0);
            const double fe = f(xe);
            if (fe < fr) {
                sim[n] = std::move(xe);
                fs[n] = fe;
            } else {
                sim[n] = std::move(xr);
                fs[n] = fr;
            }
        } else if (fr < fs[n - 1]) {
            sim[n] = std::move(xr);
            fs[n] = fr;
        } else if (fr < fs[n]) {
            auto xc = propose(xbar, 0.5);
            const double fc = f(xc);
            if (fc <= fr) {
                sim[n] = std::move(xc);
                fs[n] = fc;
            } else {
                shrink = true;
            }
        } else {
            auto xcc = propose(xbar, -0.5);
            const double fcc = f(xcc);
            if (fcc < fs[n]) {
                sim[n] = std::move(xcc);
                fs[n] = fcc;
            } else {
                shrink = true;
            }
        }
        if (shrink) {
            for (std::size_t k = 1; k <= n; ++k) {
                for (std::size_t i = 0; i < n; ++i) {
                    sim[k][i] = sim[0][i] + 0.5 * (sim[k][i] - sim[0][i]);
                }
                fs[k] = f(sim[k]);
            }
        }
        ++out.iterations;
        sort_simplex();
    }
    out.x = sim[0];
    out.f = fs[0];
    out.evaluations = f.calls;
    return out;
}

std::vector<double> fd_gradient(const Objective& f, std::span<const double> x, double fx, const Box& box,
                                double step) {
    std::vector<double> g(x.size());
    std::vector<double> y(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool up = x[i] + step <= box.hi[i];
        const bool down = x[i] - step >= box.lo[i];
        double fp = fx;
        double fm = fx;
        if (up) {
            y[i] = x[i] + step;
            fp = f(y);
        }
        if (down) {
            y[i] = x[i] - step;
            fm = f(y);
        }
        y[i] = x[i];
        if (up && down) {
            g[i] = (fp - fm) / (2.0 * step);
        } else if (up || down) {
            g[i] = (fp - fm) / step;
        } else {
            g[i] = 0.0;  // box narrower than one step
        }
    }
    return g;
}

OptimizeResult lbfgsb_fd(const Objective& objective, std::vector<double> x0, const Box& box,
                         const LbfgsbOptions& opts) {
    const std::size_t n = x0.size();
    if (n == 0) {
        throw ValidationError("lbfgsb_fd needs at least one coordinate");
    }
    if (!(opts.fd_step > 0.0)) {
        throw ValidationError("fd_step must be positive");
    }
    box.validate(n);
    box.clip(x0);
    Counted counted(objective);
    const Objective f = [&counted](std::span<const double> x) { return counted(x); };

    std::vector<double> x = x0;
    double fx = first_value(counted, x);
    std::vector<double> g = fd_gradient(f, x, fx, box, opts.fd_step);

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> hist;

    auto is_fixed = [&](std::size_t i, double gi) {
        return (x[i] <= box.lo[i] && gi > 0.0) || (x[i] >= box.hi[i] && gi < 0.0);
    };

    OptimizeResult out;
    while (out.iterations < opts.max_iter) {
        double pg = 0.0;
        std::vector<double> gf(n);
        for (std::size_t i = 0; i < n; ++i) {
            gf[i] = is_fixed(i, g[i]) ? 0.0 : g[i];
            pg = std::max(pg, std::abs(gf[i]));
        }
        if (pg <= opts.pg_tol) {
            out.converged = true;
            break;
        }

        // Two-loop recursion on the free subspace.
        std::vector<double> d = gf;
        std::vector<double> alpha(hist.size());
        for (std::size_t k = hist.size(); k-- > 0;) {
            alpha[k] = hist[k].rho * dot(hist[k].s, d);
            for (std::size_t i = 0; i < n; ++i) {
                d[i] -= alpha[k] * hist[k].y[i];
            }
        }
        if (!hist.empty()) {
            const auto& last = hist.back();
            const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
            for (auto& v : d) {
                v *= gamma;
            }
        } else {
            const double scale = 1.0 / std::max(1.0, pg);
            for (auto& v : d) {
                v *= scale;
            }
        }
        for (std::size_t k = 0; k < hist.size(); ++k) {
            const double beta = hist[k].rho * dot(hist[k].y, d);
            for (std::size_t i = 0; i < n; ++i) {
                d[i] += (alpha[k] - beta) * hist[k].s[i];
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = gf[i] == 0.0 ? 0.0 : -d[i];
        }
        if (dot(d, gf) >= 0.0) {
            hist.clear();
            const double scale = 1.0 / std::max(1.0, pg);
            for (std::size_t i = 0; i < n; ++i) {
                d[i] = -gf[i] * scale;
            }
        }

        // Projected Armijo backtracking.
        double step = 1.0;
        std::vector<double> xn(n);
        double fn = kInf;
        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries) {
            for (std::size_t i = 0; i < n; ++i) {
                xn[i] = x[i] + step * d[i];
            }
            box.clip(xn);
            double decrease = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                decrease += g[i] * (xn[i] - x[i]);
            }
            if (decrease >= 0.0) {
                step *= 0.5;
                continue;
            }
            fn = counted(xn);
            if (fn <= fx + 1e-4 * decrease) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        ++out.iterations;
        if (!accepted) {
            break;
        }

        const std::vector<double> gn = fd_gradient(f, xn, fn, box, opts.fd_step);
        Pair p{std::vector<double>(n), std::vector<double>(n), 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            p.s[i] = xn[i] - x[i];
            p.y[i] = gn[i] - g[i];
        }
        const double sy = dot(p.s, p.y);
        if (sy > 1e-12 * dot(p.y, p.y)) {
            p.rho = 1.0 / sy;
            hist.push_back(std::move(p));
            if (hist.size() > opts.history) {
                hist.pop_front();
            }
        }
        const double rel = (fx - fn) / std::max({std::abs(fx), std::abs(fn), 1.0});
        x = std::move(xn);
        fx = fn;
        g = gn;
        if (rel <= opts.f_rel_tol) {
            out.converged = true;
            break;
        }
    }
    out.x = x;
    out.f = fx;
    out.evaluations = counted.calls;
    return out;
}

}  // namespace rydvqe

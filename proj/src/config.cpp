#include "rydvqe/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace rydvqe {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were consumed so that
// unknown keys can be reported with their full path.
class Section {
public:
    Section(const json& doc, std::string path) : path_(std::move(path)) {
        if (!doc.is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
        doc_ = &doc;
    }

    bool has(const std::string& key) const { return doc_->contains(key); }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return doc_->at(key);
    }

    template <class T>
    T required(const std::string& key) {
        if (!has(key)) {
            throw ConfigError("missing field \"" + field(key) + "\"");
        }
        return convert<T>(key);
    }

    template <class T>
    T optional(const std::string& key, T fallback) {
        return has(key) ? convert<T>(key) : fallback;
    }

    Interval interval(const std::string& key, Interval fallback) {
        if (!has(key)) {
            return fallback;
        }
        const json& v = raw(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
            throw ConfigError(field(key) + ": expected [lo, hi]");
        }
        return {v[0].get<double>(), v[1].get<double>()};
    }

    Section sub(const std::string& key) {
        if (!has(key)) {
            static const json empty = json::object();
            return Section(empty, field(key));
        }
        return Section(raw(key), field(key));
    }

    void finish() const {
        for (auto it = doc_->begin(); it != doc_->end(); ++it) {
            if (!used_.count(it.key())) {
                throw ConfigError("unknown field \"" + field(it.key()) + "\"");
            }
        }
    }

private:
    template <class T>
    T convert(const std::string& key) {
        const json& v = raw(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) {
                    throw ConfigError(field(key) + ": expected a boolean");
                }
            } else if constexpr (std::is_arithmetic_v<T>) {
                if (!v.is_number()) {
                    throw ConfigError(field(key) + ": expected a number");
                }
                if constexpr (std::is_integral_v<T>) {
                    if (!v.is_number_integer()) {
                        throw ConfigError(field(key) + ": expected an integer");
                    }
                    if constexpr (std::is_unsigned_v<T>) {
                        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0) {
                            throw ConfigError(field(key) + ": expected a non-negative integer");
                        }
                    }
                }
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) {
                    throw ConfigError(field(key) + ": expected a string");
                }
            }
            return v.get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(field(key) + ": " + e.what());
        }
    }

    const json* doc_ = nullptr;
    std::string path_;
    std::set<std::string> used_;
};

template <class E>
E parse_enum(Section& s, const std::string& key, std::initializer_list<std::pair<const char*, E>> options, E fallback,
             bool required = false) {
    if (!s.has(key)) {
        if (required) {
            throw ConfigError("missing field \"" + s.field(key) + "\"");
        }
        return fallback;
    }
    const auto v = s.required<std::string>(key);
    std::string allowed;
    for (const auto& [name, e] : options) {
        if (v == name) {
            return e;
        }
        allowed += allowed.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError(s.field(key) + ": \"" + v + "\" is not one of " + allowed);
}

json interval_json(const Interval& i) {
    return json::array({i.lo, i.hi});
}

std::string frame_name(Frame f) {
    return f == Frame::Interaction ? "interaction" : "lab";
}

// Line and column of a byte offset, for syntax errors.
std::string location(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

std::string to_string(TargetKind k) {
    return k == TargetKind::Xxx ? "xxx" : "mfi";
}

std::string to_string(InitialState s) {
    switch (s) {
        case InitialState::ProductG:
            return "product_g";
        case InitialState::QPi:
            return "q_pi";
        case InitialState::Custom:
            return "custom";
    }
    return "?";
}

std::string to_string(OptimizerKind k) {
    return k == OptimizerKind::NelderMead ? "nelder_mead" : "lbfgsb_fd";
}

AppConfig parse_config(const json& doc) {
    Section root(doc, "");
    AppConfig out;
    VqeConfig& v = out.vqe;

    {
        Section c = root.sub("constants");
        auto& k = v.constants;
        k.c6_over_hbar = c.optional("c6_over_hbar", k.c6_over_hbar);
        k.clock_period_ns = c.optional("clock_period_ns", k.clock_period_ns);
        k.min_segment_ns = c.optional("min_segment_ns", k.min_segment_ns);
        k.omega_bounds = c.interval("omega_bounds", k.omega_bounds);
        k.delta_bounds = c.interval("delta_bounds", k.delta_bounds);
        k.min_nn_distance_um = c.optional("min_nn_distance_um", k.min_nn_distance_um);
        c.finish();
    }

    int n_atoms = 0;
    {
        Section g = root.sub("geometry");
        n_atoms = g.optional("n_atoms", 0);
        const std::string mode = g.optional<std::string>("radius_mode", "variable");
        if (mode != "variable" && mode != "fixed") {
            throw ConfigError("geometry.radius_mode: \"" + mode + "\" is not one of variable, fixed");
        }
        v.variable_radius = mode == "variable";
        v.radius_bounds = g.interval("radius_bounds_um", v.radius_bounds);
        v.fixed_radius_um = g.optional("fixed_radius_um", v.fixed_radius_um);
        if (!v.variable_radius && !g.has("fixed_radius_um")) {
            throw ConfigError("missing field \"geometry.fixed_radius_um\"");
        }
        if (g.has("init_radius_um")) {
            v.init_radius = g.interval("init_radius_um", {});
        }
        v.radius_scale = g.optional("radius_scale", v.radius_scale);
        g.finish();
    }

    {
        Section t = root.sub("target");
        const auto kind = parse_enum<TargetKind>(t, "kind", {{"xxx", TargetKind::Xxx}, {"mfi", TargetKind::Mfi}},
                                                 TargetKind::Xxx, true);
        const int n_sites = t.optional("n_sites", n_atoms);
        if (n_sites == 0) {
            throw ConfigError("missing field \"geometry.n_atoms\"");
        }
        if (n_atoms != 0 && n_sites != n_atoms) {
            throw ConfigError("target.n_sites must equal geometry.n_atoms");
        }
        const auto boundary = parse_enum<Boundary>(
            t, "boundary", {{"periodic", Boundary::Periodic}, {"open", Boundary::Open}}, Boundary::Periodic);
        TargetHamiltonian h;
        h.kind = kind;
        h.n_sites = n_sites;
        h.boundary = boundary;
        if (kind == TargetKind::Xxx) {
            h.j = t.optional("J", 1.0);
        } else {
            h.j = t.optional("J_I", 1.0);
            h.h_x = t.required<double>("h_x");
            h.h_z = t.required<double>("h_z");
        }
        t.finish();
        try {
            h.validate();
        } catch (const ValidationError& e) {
            throw ConfigError(e.what());
        }
        v.target = h;
    }

    {
        Section s = root.sub("vqe");
        v.total_duration_ns = s.optional("total_duration_ns", v.total_duration_ns);
        v.initial_state = parse_enum<InitialState>(
            s, "initial_state",
            {{"product_g", InitialState::ProductG}, {"q_pi", InitialState::QPi}, {"custom", InitialState::Custom}},
            v.initial_state);
        if (s.has("custom_state")) {
            const json& a = s.raw("custom_state");
            if (!a.is_array()) {
                throw ConfigError("vqe.custom_state: expected an array of [re, im] pairs");
            }
            std::vector<cplx> amps;
            for (const auto& p : a) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                    throw ConfigError("vqe.custom_state: expected an array of [re, im] pairs");
                }
                amps.emplace_back(p[0].get<double>(), p[1].get<double>());
            }
            try {
                int n = 0;
                while ((std::size_t{1} << n) < amps.size()) {
                    ++n;
                }
                v.custom_state = StateVector(n, std::move(amps));
            } catch (const ValidationError& e) {
                throw ConfigError(std::string("vqe.custom_state: ") + e.what());
            }
        }
        {
            Section o = s.sub("optimizer");
            v.optimizer = parse_enum<OptimizerKind>(
                o, "kind", {{"nelder_mead", OptimizerKind::NelderMead}, {"lbfgsb_fd", OptimizerKind::LbfgsbFd}},
                v.optimizer);
            v.max_iter = o.optional("max_iter", v.max_iter);
            v.fd_step = o.optional("fd_step", v.fd_step);
            v.x_tol = o.optional("x_tol", v.x_tol);
            v.f_tol = o.optional("f_tol", v.f_tol);
            o.finish();
        }
        v.max_segments = s.optional("max_segments", v.max_segments);
        v.error_threshold_percent = s.optional("error_threshold_percent", v.error_threshold_percent);
        v.seed = s.optional("seed", v.seed);
        v.step_ns = s.optional("step_ns", v.step_ns);
        v.frame = parse_enum<Frame>(s, "frame", {{"interaction", Frame::Interaction}, {"lab", Frame::Lab}}, v.frame);
        v.use_symmetry = s.optional("use_symmetry", v.use_symmetry);
        v.penalty = s.optional("penalty", v.penalty);
        s.finish();
    }

    {
        Section m = root.sub("measure");
        out.measure.shots_per_basis = m.optional("shots_per_basis", out.measure.shots_per_basis);
        out.measure.seed = m.optional("seed", out.measure.seed);
        out.measure.rotation_us = m.optional("rotation_us", out.measure.rotation_us);
        out.measure.coherence_us = m.optional("coherence_us", out.measure.coherence_us);
        m.finish();
    }

    {
        Section o = root.sub("output");
        out.output.directory = o.optional<std::string>("directory", out.output.directory);
        o.finish();
    }
    root.finish();

    try {
        v.validate();
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
    if (out.measure.shots_per_basis == 0) {
        throw ConfigError("measure.shots_per_basis must be at least 1");
    }
    return out;
}

AppConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ":" + location(text, e.byte) + ": " + e.what());
    }
    try {
        return parse_config(doc);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

json serialize_vqe_config(const VqeConfig& v) {
    json doc;
    const auto& k = v.constants;
    doc["constants"] = {{"c6_over_hbar", k.c6_over_hbar},
                        {"clock_period_ns", k.clock_period_ns},
                        {"min_segment_ns", k.min_segment_ns},
                        {"omega_bounds", interval_json(k.omega_bounds)},
                        {"delta_bounds", interval_json(k.delta_bounds)},
                        {"min_nn_distance_um", k.min_nn_distance_um}};
    json g = {{"n_atoms", v.n_atoms()},
              {"radius_mode", v.variable_radius ? "variable" : "fixed"},
              {"radius_bounds_um", interval_json(v.radius_bounds)},
              {"fixed_radius_um", v.fixed_radius_um},
              {"radius_scale", v.radius_scale}};
    if (v.init_radius) {
        g["init_radius_um"] = interval_json(*v.init_radius);
    }
    doc["geometry"] = g;
    json t = {{"kind", to_string(v.target.kind)},
              {"n_sites", v.target.n_sites},
              {"boundary", v.target.boundary == Boundary::Periodic ? "periodic" : "open"}};
    if (v.target.kind == TargetKind::Xxx) {
        t["J"] = v.target.j;
    } else {
        t["J_I"] = v.target.j;
        t["h_x"] = v.target.h_x;
        t["h_z"] = v.target.h_z;
    }
    doc["target"] = t;
    json s = {{"total_duration_ns", v.total_duration_ns},
              {"initial_state", to_string(v.initial_state)},
              {"optimizer",
               {{"kind", to_string(v.optimizer)},
                {"max_iter", v.max_iter},
                {"fd_step", v.fd_step},
                {"x_tol", v.x_tol},
                {"f_tol", v.f_tol}}},
              {"max_segments", v.max_segments},
              {"error_threshold_percent", v.error_threshold_percent},
              {"seed", v.seed},
              {"step_ns", v.step_ns},
              {"frame", frame_name(v.frame)},
              {"use_symmetry", v.use_symmetry},
              {"penalty", v.penalty}};
    if (v.custom_state) {
        json a = json::array();
        for (const auto& z : v.custom_state->amplitudes()) {
            a.push_back({z.real(), z.imag()});
        }
        s["custom_state"] = a;
    }
    doc["vqe"] = s;
    return doc;
}

json serialize_config(const AppConfig& cfg) {
    json doc = serialize_vqe_config(cfg.vqe);
    doc["measure"] = {{"shots_per_basis", cfg.measure.shots_per_basis},
                      {"seed", cfg.measure.seed},
                      {"rotation_us", cfg.measure.rotation_us},
                      {"coherence_us", cfg.measure.coherence_us}};
    doc["output"] = {{"directory", cfg.output.directory}};
    return doc;
}

}  // namespace rydvqe

#include "satd/scenario.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include <fmt/format.h>

namespace satd {

using nlohmann::json;

std::string to_string(ProtocolName p) {
    switch (p) {
        case ProtocolName::Adiabatic: return "adiabatic";
        case ProtocolName::Satd: return "satd";
        case ProtocolName::SatdChirped: return "satd_chirped";
        case ProtocolName::Direct: return "direct";
        case ProtocolName::DirectChirped: return "direct_chirped";
    }
    return "?";
}

ProtocolName protocol_from_string(const std::string& s) {
    for (ProtocolName p : {ProtocolName::Adiabatic, ProtocolName::Satd, ProtocolName::SatdChirped,
                           ProtocolName::Direct, ProtocolName::DirectChirped})
        if (to_string(p) == s) return p;
    throw ValidationError("gate.protocol", "unknown protocol '" + s + "'");
}

namespace {

// Typed access to one JSON object with unknown-key detection.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_[key].is_null();
    }

    double num(const std::string& key, double def) { return has(key) ? get_num(key) : def; }

    std::optional<double> opt_num(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return get_num(key);
    }

    int integer(const std::string& key, int def) {
        if (!has(key)) return def;
        if (!j_[key].is_number_integer()) throw ValidationError(at(key), "expected an integer");
        return j_[key].get<int>();
    }

    bool boolean(const std::string& key, bool def) {
        if (!has(key)) return def;
        if (!j_[key].is_boolean()) throw ValidationError(at(key), "expected true or false");
        return j_[key].get<bool>();
    }

    std::string str(const std::string& key, const std::string& def) {
        if (!has(key)) return def;
        if (!j_[key].is_string()) throw ValidationError(at(key), "expected a string");
        return j_[key].get<std::string>();
    }

    const json& sub(const std::string& key) {
        seen_.insert(key);
        return j_[key];
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ValidationError(at(it.key()), "unknown key");
    }

private:
    double get_num(const std::string& key) const {
        if (!j_[key].is_number()) throw ValidationError(at(key), "expected a number");
        const double v = j_[key].get<double>();
        if (!std::isfinite(v)) throw ValidationError(at(key), "must be finite");
        return v;
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) throw ValidationError(path, what);
}

double kb_rad_ns_per_mk() { return ghz_to_rad_ns(kb_over_h_ghz_per_mk); }

}  // namespace

Scenario parse_scenario(const json& root) {
    Scenario s;
    Reader r(root, "");

    if (r.has("circuit")) {
        Reader c(r.sub("circuit"), "circuit");
        s.circuit.e_c_ghz = c.num("e_c_ghz", s.circuit.e_c_ghz);
        s.circuit.e_j_ghz = c.num("e_j_ghz", s.circuit.e_j_ghz);
        s.circuit.e_l_ghz = c.num("e_l_ghz", s.circuit.e_l_ghz);
        s.circuit.flux_phi0 = c.num("flux_phi0", s.circuit.flux_phi0);
        s.basis_size = c.integer("basis_size", s.basis_size);
        s.levels = c.integer("levels", s.levels);
        c.finish();
        require(s.circuit.e_c_ghz > 0, "circuit.e_c_ghz", "must be positive");
        require(s.circuit.e_j_ghz > 0, "circuit.e_j_ghz", "must be positive");
        require(s.circuit.e_l_ghz > 0, "circuit.e_l_ghz", "must be positive");
        require(s.levels >= 4, "circuit.levels", "must be at least 4");
        require(s.basis_size >= 4 * s.levels, "circuit.basis_size", "must be at least 4 x levels");
    }

    if (r.has("tripod")) {
        Reader t(r.sub("tripod"), "tripod");
        s.tripod = {t.integer("idx0", 1), t.integer("idx1", 0), t.integer("idx_a", 2), t.integer("idx_e", 5)};
        t.finish();
        const char* names[4] = {"idx0", "idx1", "idx_a", "idx_e"};
        for (int i = 0; i < 4; ++i) {
            require(s.tripod[i] >= 0 && s.tripod[i] < s.levels, std::string("tripod.") + names[i],
                    "must index a retained level");
            for (int k = 0; k < i; ++k)
                require(s.tripod[i] != s.tripod[k], std::string("tripod.") + names[i], "duplicate level index");
        }
    }

    if (r.has("gate")) {
        Reader g(r.sub("gate"), "gate");
        s.gate.protocol = protocol_from_string(g.str("protocol", to_string(s.gate.protocol)));
        s.gate.alpha = g.num("alpha_rad", s.gate.alpha);
        s.gate.beta = g.num("beta_rad", s.gate.beta);
        s.gate.gamma0 = g.num("gamma0_rad", s.gate.gamma0);
        s.gate.chi = g.num("chi_rad", s.gate.chi);
        s.gate.t_g = g.num("t_g_ns", s.gate.t_g);
        s.gate.t_ramp = g.opt_num("t_ramp_ns");
        s.gate.omega0_scaled = g.opt_num("omega0_scaled");
        g.finish();
        require(s.gate.t_g > 0, "gate.t_g_ns", "must be positive");
        if (s.gate.t_ramp)
            require(*s.gate.t_ramp > 0 && *s.gate.t_ramp < s.gate.t_g / 4, "gate.t_ramp_ns", "must lie in (0, t_g/4)");
        if (s.gate.omega0_scaled) require(*s.gate.omega0_scaled > 0, "gate.omega0_scaled", "must be positive");
    }

    if (r.has("noise")) {
        Reader n(r.sub("noise"), "noise");
        NoiseModel m;
        m.a_flux = n.num("a_flux_phi0", m.a_flux);
        m.d_factor = n.num("d_factor", m.d_factor);
        m.q_diel = n.opt_num("q_diel");
        m.temperature = n.num("temperature_mk", 0.0) * kb_rad_ns_per_mk();
        m.reference_level = n.integer("reference_level", m.reference_level);
        m.all_t1_channels = n.boolean("all_t1_channels", m.all_t1_channels);
        n.finish();
        require(m.a_flux >= 0, "noise.a_flux_phi0", "must be non-negative");
        require(m.d_factor > 0 && m.d_factor < 1, "noise.d_factor", "must lie in (0, 1)");
        if (m.q_diel) require(*m.q_diel > 0, "noise.q_diel", "must be positive");
        require(m.temperature >= 0, "noise.temperature_mk", "must be non-negative");
        require(m.reference_level >= 0 && m.reference_level < s.levels, "noise.reference_level",
                "must index a retained level");
        s.noise = m;
    }

    if (r.has("cavity")) {
        Reader c(r.sub("cavity"), "cavity");
        CavitySpec cav;
        cav.omega_cav = ghz_to_rad_ns(c.num("omega_cav_ghz", rad_ns_to_ghz(cav.omega_cav)));
        cav.kappa = ghz_to_rad_ns(c.num("kappa_ghz", rad_ns_to_ghz(cav.kappa)));
        cav.g = ghz_to_rad_ns(c.num("g_ghz", rad_ns_to_ghz(cav.g)));
        cav.n_th = c.num("n_th", cav.n_th);
        cav.n_cav_max = c.num("n_cav_max", cav.n_cav_max);
        c.finish();
        require(cav.omega_cav > 0, "cavity.omega_cav_ghz", "must be positive");
        require(cav.g > 0, "cavity.g_ghz", "must be positive");
        require(cav.kappa >= 0, "cavity.kappa_ghz", "must be non-negative");
        require(cav.n_th >= 0 && cav.n_th < 1, "cavity.n_th", "must lie in [0, 1)");
        require(cav.n_cav_max >= 0 && cav.n_cav_max < 1, "cavity.n_cav_max", "must lie in [0, 1)");
        s.cavity = cav;
    }

    if (r.has("sweep")) {
        Reader w(r.sub("sweep"), "sweep");
        SweepConfig sw;
        sw.axis = w.str("axis", "t_g_ns");
        require(sw.axis == "t_g_ns" || sw.axis == "omega0_scaled" || sw.axis == "v_rms", "sweep.axis",
                "must be one of t_g_ns, omega0_scaled, v_rms");
        require(w.has("values") && r.sub("sweep")["values"].is_array(), "sweep.values", "expected an array");
        const json& vals = w.sub("values");
        require(!vals.empty(), "sweep.values", "must be nonempty");
        for (size_t i = 0; i < vals.size(); ++i) {
            const std::string p = fmt::format("sweep.values[{}]", i);
            require(vals[i].is_number(), p, "expected a number");
            const double v = vals[i].get<double>();
            require(std::isfinite(v) && v > 0, p, "must be positive");
            sw.values.push_back(v);
        }
        sw.compare_dd = w.boolean("compare_dd", false);
        w.finish();
        if (sw.compare_dd) {
            require(sw.axis == "v_rms", "sweep.compare_dd", "requires axis v_rms");
            require(!is_direct(s.gate.protocol), "sweep.compare_dd", "base protocol must be a tripod protocol");
        }
        s.sweep = sw;
    }

    if (r.has("solver")) {
        Reader v(r.sub("solver"), "solver");
        s.solver.rel_tol = v.opt_num("rel_tol");
        s.solver.abs_tol = v.num("abs_tol", s.solver.abs_tol);
        s.solver.rwa = v.boolean("rwa", s.solver.rwa);
        s.solver.samples = v.integer("samples", s.solver.samples);
        s.solver.stark_samples = v.integer("stark_samples", s.solver.stark_samples);
        s.solver.min_detuning_mhz = v.num("min_detuning_mhz", s.solver.min_detuning_mhz);
        v.finish();
        if (s.solver.rel_tol)
            require(*s.solver.rel_tol > 0 && *s.solver.rel_tol <= 1e-3, "solver.rel_tol", "must lie in (0, 1e-3]");
        require(s.solver.abs_tol > 0 && s.solver.abs_tol <= 1e-3, "solver.abs_tol", "must lie in (0, 1e-3]");
        require(s.solver.samples >= 400, "solver.samples", "must be at least 400");
        require(s.solver.stark_samples >= 200, "solver.stark_samples", "must be at least 200");
        require(s.solver.min_detuning_mhz > 0, "solver.min_detuning_mhz", "must be positive");
        require(!(s.solver.rwa && is_direct(s.gate.protocol)), "solver.rwa", "RWA mode models the tripod only");
    }

    if (r.has("outputs")) {
        Reader o(r.sub("outputs"), "outputs");
        s.outputs.dir = o.str("dir", s.outputs.dir);
        s.outputs.csv = o.boolean("csv", s.outputs.csv);
        s.outputs.json = o.boolean("json", s.outputs.json);
        o.finish();
    }
    r.finish();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cli", "cannot open scenario file " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw Error("cli", fmt::format("{}: {}", path, e.what()));
    }
    return parse_scenario(j);
}

json to_json(const Scenario& s) {
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    json j;
    j["circuit"] = {{"e_c_ghz", s.circuit.e_c_ghz},     {"e_j_ghz", s.circuit.e_j_ghz},
                    {"e_l_ghz", s.circuit.e_l_ghz},     {"flux_phi0", s.circuit.flux_phi0},
                    {"basis_size", s.basis_size},       {"levels", s.levels}};
    j["tripod"] = {{"idx0", s.tripod[0]}, {"idx1", s.tripod[1]}, {"idx_a", s.tripod[2]}, {"idx_e", s.tripod[3]}};
    j["gate"] = {{"protocol", to_string(s.gate.protocol)},
                 {"alpha_rad", s.gate.alpha},
                 {"beta_rad", s.gate.beta},
                 {"gamma0_rad", s.gate.gamma0},
                 {"chi_rad", s.gate.chi},
                 {"t_g_ns", s.gate.t_g},
                 {"t_ramp_ns", opt(s.gate.t_ramp)},
                 {"omega0_scaled", opt(s.gate.omega0_scaled)}};
    if (s.noise)
        j["noise"] = {{"a_flux_phi0", s.noise->a_flux},
                      {"d_factor", s.noise->d_factor},
                      {"q_diel", opt(s.noise->q_diel)},
                      {"temperature_mk", s.noise->temperature / kb_rad_ns_per_mk()},
                      {"reference_level", s.noise->reference_level},
                      {"all_t1_channels", s.noise->all_t1_channels}};
    if (s.cavity)
        j["cavity"] = {{"omega_cav_ghz", rad_ns_to_ghz(s.cavity->omega_cav)},
                       {"kappa_ghz", rad_ns_to_ghz(s.cavity->kappa)},
                       {"g_ghz", rad_ns_to_ghz(s.cavity->g)},
                       {"n_th", s.cavity->n_th},
                       {"n_cav_max", s.cavity->n_cav_max}};
    if (s.sweep) j["sweep"] = {{"axis", s.sweep->axis}, {"values", s.sweep->values}, {"compare_dd", s.sweep->compare_dd}};
    j["solver"] = {{"rel_tol", opt(s.solver.rel_tol)},    {"abs_tol", s.solver.abs_tol},
                   {"rwa", s.solver.rwa},                 {"samples", s.solver.samples},
                   {"stark_samples", s.solver.stark_samples}, {"min_detuning_mhz", s.solver.min_detuning_mhz}};
    j["outputs"] = {{"dir", s.outputs.dir}, {"csv", s.outputs.csv}, {"json", s.outputs.json}};
    return j;
}

std::string config_header(const Scenario& s) { return "# config: " + to_json(s).dump(); }

Scenario parse_config_header(const std::string& line) {
    const std::string tag = "# config: ";
    if (line.rfind(tag, 0) != 0) throw Error("cli", "not a config header line");
    return parse_scenario(json::parse(line.substr(tag.size())));
}

Prepared prepare(const Scenario& s) {
    Prepared p;
    DiagonalizeOptions o;
    o.basis_size = s.basis_size;
    o.levels = s.levels;
    p.spectrum = std::make_shared<SpectrumData>(diagonalize(s.circuit, o));
    if (s.noise) p.spectrum->flux_dispersion = flux_dispersions(s.circuit, p.spectrum->basis_size, s.levels);
    p.trip = assign_tripod(*p.spectrum, s.tripod);
    return p;
}

namespace {

double resolved_omega0(const GateConfig& g) {
    return g.omega0_scaled ? two_pi * *g.omega0_scaled / g.t_g : optimize_omega0(g.t_g).omega0;
}

DissipatorSet to_rwa_basis(const DissipatorSet& d, const TripodAssignment& trip) {
    const std::array<int, 4> idx = trip.indices();
    DissipatorSet out;
    out.z = RVec::Zero(4);
    out.gamma = RVec::Zero(4);
    for (int a = 0; a < 4; ++a) {
        if (d.z.size()) out.z[a] = d.z[idx[a]];
        if (d.gamma.size()) out.gamma[a] = d.gamma[idx[a]];
    }
    for (const JumpOp& j : d.jumps) {
        int from = -1, to = -1;
        for (int a = 0; a < 4; ++a) {
            if (idx[a] == j.from) from = a;
            if (idx[a] == j.to) to = a;
        }
        if (from >= 0 && to >= 0) out.jumps.push_back({from, to, j.rate});
    }
    out.ledger = d.ledger;
    return out;
}

}  // namespace

SimulationResult simulate(const Scenario& sc, const Prepared& prep, int workers) {
    const SpectrumData& sp = *prep.spectrum;
    const TripodAssignment& trip = prep.trip;
    const GateConfig& g = sc.gate;
    const double min_det = two_pi * sc.solver.min_detuning_mhz * 1e-3;
    const bool chirped = is_chirped(g.protocol);

    SimulationResult res;
    res.protocol = g.protocol;
    res.t_g = g.t_g;
    for (const auto& d : trip.diagnostics) res.warnings.push_back("diagnostic: " + d);

    DriveSignal signal;
    StarkShiftTable stark;
    std::function<Envelopes(double)> omega;
    GateTarget target;
    if (is_direct(g.protocol)) {
        DirectPulse dp = direct_drive_pulse(sp, trip, g.chi, g.t_g, chirped, sc.solver.stark_samples, min_det);
        signal = dp.signal;
        stark = dp.stark;
        target = target_unitary(pi / 4, 0.0, g.chi);
        res.power.omega_rms = std::abs(g.chi) * std::sqrt(1.5) / g.t_g;
        res.power.v_rms_formula = v_rms_direct_closed_form(sp.charge_elems(trip.idx0, trip.idx1), g.chi, g.t_g);
    } else {
        GateParams p;
        p.alpha = g.alpha;
        p.beta = g.beta;
        p.gamma0 = g.gamma0;
        p.t_g = g.t_g;
        p.t_ramp = g.t_ramp.value_or(0.01 * g.t_g);
        p.omega0 = resolved_omega0(g);
        p.protocol = g.protocol == ProtocolName::Adiabatic ? Protocol::Adiabatic : Protocol::Satd;
        p.chirped = chirped;
        TripodPulse tp = tripod_pulse(sp, trip, p, sc.solver.stark_samples, min_det);
        signal = tp.signal;
        stark = tp.stark;
        omega = tp.omega;
        res.omega0 = p.omega0;
        target = target_unitary(p.alpha, p.beta, p.gamma0);
        res.power.omega_rms = p.protocol == Protocol::Satd ? omega_rms(p.t_g, p.omega0) : p.omega0;
        res.power.v_rms_formula = v_rms_closed_form(trip, p.alpha, res.power.omega_rms);
    }
    for (const auto& w : stark.warnings) res.warnings.push_back(w);
    res.t_total = signal.t_total;
    res.power.v_rms = v_rms(signal);
    res.power.qsl_bound = qsl_bound(g.t_g);
    res.power.reference_cost = reference_cost(g.t_g);
    if (sc.cavity) res.n_cav = vrms_to_photons(res.power.v_rms, sc.cavity->g);

    DissipatorSet diss;
    if (sc.noise) diss = build_dissipators(sp, trip, *sc.noise, res.t_total);
    const bool open = sc.noise && !diss.empty();

    EvolutionSpec spec;
    int i0 = trip.idx0, i1 = trip.idx1;
    const std::array<int, 4> idx = trip.indices();
    std::vector<int> tripod_levels(idx.begin(), idx.end());
    Mat2 frame = Mat2::Identity();
    if (sc.solver.rwa) {
        spec = rwa_spec(omega, res.t_total);
        spec.mode = open ? Mode::OpenRwa : Mode::ClosedRwa;
        if (open) spec.dissipators = to_rwa_basis(diss, trip);
        i0 = 0;
        i1 = 1;
        tripod_levels = {0, 1, 2, 3};
    } else {
        spec = lab_spec(prep.spectrum, signal, open);
        if (open) spec.dissipators = diss;
        frame = frame_unitary(sp, i0, i1, res.t_total, chirped ? &stark : nullptr);
    }
    spec.rel_tol = sc.solver.rel_tol.value_or(open ? 1e-8 : 1e-10);
    spec.abs_tol = sc.solver.abs_tol;
    spec.samples = sc.solver.samples;

    const SixAxialResult six = propagate_six_axial(spec, i0, i1, workers, true);
    for (const Trajectory& tr : six.trajectories) {
        res.max_trace_drift = std::max(res.max_trace_drift, tr.max_trace_drift);
        res.max_herm_drift = std::max(res.max_herm_drift, tr.max_herm_drift);
        res.max_norm_drift = std::max(res.max_norm_drift, tr.max_norm_drift);
        res.min_eigenvalue = std::min(res.min_eigenvalue, tr.min_eigenvalue);
        res.steps += tr.stats.accepted;
    }
    res.fidelity = averaged_fidelity(six.finals, target, frame, i0, i1, tripod_levels);
    return res;
}

SimulationResult simulate(const Scenario& s, int workers) { return simulate(s, prepare(s), workers); }

json to_json(const SimulationResult& r) {
    json j;
    j["protocol"] = to_string(r.protocol);
    j["t_g_ns"] = r.t_g;
    j["t_total_ns"] = r.t_total;
    j["omega0_scaled"] = r.omega0 * r.t_g / two_pi;
    j["fbar"] = r.fidelity.fbar;
    j["error"] = r.fidelity.error;
    j["leakage"] = r.fidelity.leakage;
    j["overlaps"] = r.fidelity.overlaps;
    j["power"] = {{"omega_rms_scaled", r.power.omega_rms * r.t_g / two_pi},
                  {"v_rms", r.power.v_rms},
                  {"v_rms_times_tg", r.power.v_rms * r.t_g},
                  {"v_rms_formula", r.power.v_rms_formula},
                  {"qsl_bound", r.power.qsl_bound},
                  {"reference_cost", r.power.reference_cost}};
    j["n_cav"] = r.n_cav ? json(*r.n_cav) : json(nullptr);
    j["invariants"] = {{"max_trace_drift", r.max_trace_drift},
                       {"max_hermiticity_drift", r.max_herm_drift},
                       {"min_eigenvalue", r.min_eigenvalue},
                       {"max_norm_drift", r.max_norm_drift}};
    j["steps"] = r.steps;
    j["warnings"] = r.warnings;
    return j;
}

double vrms_constant(const Scenario& s, const Prepared& prep, ProtocolName p) {
    if (is_direct(p))
        return v_rms_direct_closed_form(prep.spectrum->charge_elems(prep.trip.idx0, prep.trip.idx1), s.gate.chi, 1.0);
    double om;
    if (p == ProtocolName::Adiabatic)
        om = two_pi * s.gate.omega0_scaled.value_or(optimize_omega0(1.0).scaled_omega0);
    else
        om = s.gate.omega0_scaled ? omega_rms(1.0, two_pi * *s.gate.omega0_scaled) : optimize_omega0(1.0).omega_rms;
    return v_rms_closed_form(prep.trip, s.gate.alpha, om);
}

SweepOutput sweep_runner(const Scenario& s, int workers) {
    if (!s.sweep) throw Error("cli", "scenario has no sweep section");
    const Prepared prep = prepare(s);
    const SweepConfig& sw = *s.sweep;

    struct Point {
        double axis;
        Scenario sc;
    };
    std::vector<Point> points;
    const ProtocolName dd = is_chirped(s.gate.protocol) ? ProtocolName::DirectChirped : ProtocolName::Direct;
    for (double v : sw.values) {
        Scenario sc = s;
        sc.sweep.reset();
        if (sw.axis == "t_g_ns") {
            sc.gate.t_g = v;
        } else if (sw.axis == "omega0_scaled") {
            sc.gate.omega0_scaled = v;
        } else {
            sc.gate.t_g = vrms_constant(s, prep, s.gate.protocol) / v;
        }
        points.push_back({v, sc});
        if (sw.compare_dd) {
            Scenario d = sc;
            d.gate.protocol = dd;
            d.gate.t_g = vrms_constant(s, prep, dd) / v;
            points.push_back({v, d});
        }
    }

    SweepOutput out;
    out.rows.resize(points.size());
    auto run_point = [&](size_t i) {
        SweepRow& row = out.rows[i];
        row.axis_value = points[i].axis;
        row.protocol = points[i].sc.gate.protocol;
        try {
            row.result = simulate(points[i].sc, prep, points.size() == 1 ? workers : 1);
            row.status = "ok";
        } catch (const std::exception& e) {
            row.status = e.what();
        }
    };
    workers = std::max(1, workers);
    if (workers == 1 || points.size() == 1) {
        for (size_t i = 0; i < points.size(); ++i) run_point(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (size_t i; (i = next++) < points.size();) run_point(i);
            });
        for (auto& t : pool) t.join();
    }

    if (sw.compare_dd) {
        for (size_t i = 0; i + 1 < out.rows.size(); i += 2) {
            const SweepRow& a = out.rows[i];
            const SweepRow& b = out.rows[i + 1];
            ComparisonRow c{a.axis_value, points[i].sc.gate.t_g, points[i + 1].sc.gate.t_g, 0, NAN, NAN, NAN};
            c.ratio = c.t_g_dd / c.t_g_satd;
            if (a.result && b.result) {
                c.error_satd = a.result->fidelity.error;
                c.error_dd = b.result->fidelity.error;
                c.zeta = c.error_dd / c.error_satd;
            }
            out.comparisons.push_back(c);
        }
    }
    return out;
}

namespace {

namespace fs = std::filesystem;

std::ofstream open_artifact(const Scenario& s, const std::string& name) {
    fs::create_directories(s.outputs.dir);
    const fs::path path = fs::path(s.outputs.dir) / name;
    std::ofstream f(path);
    if (!f) throw Error("cli", "cannot write " + path.string());
    return f;
}

std::ofstream open_csv(const Scenario& s, const std::string& name, const std::string& columns) {
    std::ofstream f = open_artifact(s, name);
    f << config_header(s) << "\n" << columns << "\n";
    return f;
}

void write_json(const Scenario& s, const std::string& name, json body) {
    if (!s.outputs.json) return;
    json doc;
    doc["schema"] = report_schema;
    doc["config"] = to_json(s);
    doc["result"] = std::move(body);
    open_artifact(s, name) << doc.dump(2) << "\n";
}

std::string num(double x) { return fmt::format("{:.12g}", x); }

void run_spectrum(const Scenario& s, const json& extra) {
    Scenario sn = s;
    const Prepared prep = prepare(sn);
    const SpectrumData& sp = *prep.spectrum;
    if (s.outputs.csv) {
        auto f = open_csv(s, "spectrum.csv", "k,l,energy_k_rad_ns,re_n,im_n,re_phi,im_phi");
        for (int k = 0; k < sp.levels; ++k)
            for (int l = 0; l < sp.levels; ++l)
                f << k << "," << l << "," << num(sp.energies[k]) << "," << num(sp.charge_elems(k, l).real()) << ","
                  << num(sp.charge_elems(k, l).imag()) << "," << num(sp.phase_elems(k, l).real()) << ","
                  << num(sp.phase_elems(k, l).imag()) << "\n";
        RVec disp = flux_dispersions(s.circuit, sp.basis_size, sp.levels);
        auto g = open_csv(s, "levels.csv", "k,energy_ghz,relative_energy_ghz,flux_dispersion_rad_ns_per_phi0");
        for (int k = 0; k < sp.levels; ++k)
            g << k << "," << num(rad_ns_to_ghz(sp.energies[k])) << ","
              << num(rad_ns_to_ghz(sp.energies[k] - sp.energies[0])) << "," << num(disp[k]) << "\n";
    }
    if (extra.value("convergence", false)) {
        std::vector<int> sizes;
        for (int b = std::max(4 * s.levels, 100); b <= 2 * s.basis_size; b += 50) sizes.push_back(b);
        auto f = open_csv(s, "convergence.csv", "basis_size,max_change_rad_ns");
        for (const auto& row : convergence_sweep(s.circuit, s.levels, sizes))
            f << row.basis_size << "," << num(row.max_change) << "\n";
    }
    json body;
    body["basis_size"] = sp.basis_size;
    body["convergence_residual_rad_ns"] = sp.convergence_residual;
    body["tripod_drive_freqs_ghz"] = {rad_ns_to_ghz(prep.trip.drive_freqs[0]), rad_ns_to_ghz(prep.trip.drive_freqs[1]),
                                      rad_ns_to_ghz(prep.trip.drive_freqs[2])};
    body["abs_n"] = {{"01", std::abs(sp.charge_elems(prep.trip.idx0, prep.trip.idx1))},
                     {"0e", std::abs(prep.trip.n_je[0])},
                     {"1e", std::abs(prep.trip.n_je[1])},
                     {"ae", std::abs(prep.trip.n_je[2])}};
    body["diagnostics"] = prep.trip.diagnostics;
    write_json(s, "spectrum.json", body);
}

void run_pulses(const Scenario& s, const json& extra) {
    const Prepared prep = prepare(s);
    const SpectrumData& sp = *prep.spectrum;
    const double min_det = two_pi * s.solver.min_detuning_mhz * 1e-3;
    DriveSignal signal;
    if (is_direct(s.gate.protocol)) {
        signal = direct_drive_pulse(sp, prep.trip, s.gate.chi, s.gate.t_g, is_chirped(s.gate.protocol),
                                    s.solver.stark_samples, min_det)
                     .signal;
    } else {
        GateParams p;
        p.alpha = s.gate.alpha;
        p.beta = s.gate.beta;
        p.gamma0 = s.gate.gamma0;
        p.t_g = s.gate.t_g;
        p.t_ramp = s.gate.t_ramp.value_or(0.01 * s.gate.t_g);
        p.omega0 = resolved_omega0(s.gate);
        p.protocol = s.gate.protocol == ProtocolName::Adiabatic ? Protocol::Adiabatic : Protocol::Satd;
        p.chirped = is_chirped(s.gate.protocol);
        signal = tripod_pulse(sp, prep.trip, p, s.solver.stark_samples, min_det).signal;
    }
    const double period = two_pi / signal.max_carrier();
    const double dt = extra.value("dt_ns", period / 10.0);
    const int n = int(std::ceil(signal.t_total / dt));
    std::string cols = "t_ns";
    for (size_t j = 0; j < signal.tones.size(); ++j) cols += fmt::format(",re_v{0},im_v{0}", j);
    for (size_t j = 0; j < signal.tones.size(); ++j) cols += fmt::format(",freq{}_ghz", j);
    for (size_t j = 0; j < signal.tones.size(); ++j) cols += fmt::format(",chirp{}_mhz", j);
    cols += ",voltage";
    auto f = open_csv(s, "pulses.csv", cols);
    for (int i = 0; i <= n; ++i) {
        const double t = std::min(i * dt, signal.t_total);
        f << num(t);
        for (const Tone& tn : signal.tones) {
            const cplx v = tn.envelope(t);
            f << "," << num(v.real()) << "," << num(v.imag());
        }
        for (const Tone& tn : signal.tones) f << "," << num(rad_ns_to_ghz(tn.inst_freq(t)));
        for (const Tone& tn : signal.tones) f << "," << num(rad_ns_to_ghz(tn.inst_freq(t) - tn.spec.carrier) * 1e3);
        f << "," << num(lab_voltage(signal, t)) << "\n";
    }
    const double fmax = extra.value("f_max_ghz", 1.5 * rad_ns_to_ghz(signal.max_carrier()));
    auto g = open_csv(s, "pulse_spectrum.csv", "f_ghz,magnitude");
    for (const auto& pt : voltage_spectrum(signal, 0.0, fmax, extra.value("nf", 3001), period / 20.0))
        g << num(pt.f_ghz) << "," << num(pt.magnitude) << "\n";
}

void run_power(const Scenario& s, const json& extra) {
    const double t_g = s.gate.t_g;
    const int npts = extra.value("points", 351);
    if (s.outputs.csv) {
        auto f = open_csv(s, "power_curve.csv", "omega0_scaled,omega_rms_scaled,qsl_scaled,reference_scaled");
        for (int i = 0; i < npts; ++i) {
            const double x = 0.5 + 3.5 * i / (npts - 1);
            f << num(x) << "," << num(omega_rms(t_g, two_pi * x / t_g) * t_g / two_pi) << ",1,"
              << num(reference_cost_scaled / two_pi) << "\n";
        }
    }
    const OmegaOptimum o = optimize_omega0(t_g);
    json body = {{"omega0_scaled", o.scaled_omega0}, {"omega_rms_scaled", o.scaled_rms}};
    const Prepared prep = prepare(s);
    const DdSatdComparison c = compare_dd_satd(*prep.spectrum, prep.trip, s.gate.alpha, s.gate.chi);
    body["v_rms_times_tg"] = {{"satd", c.c_satd}, {"direct", c.c_dd}, {"ratio", c.ratio}};
    if (s.cavity)
        body["photon_constrained_min_tg_ns"] = {
            {"satd", photon_constrained_min_tg(s.cavity->g, s.cavity->n_cav_max, c.c_satd)},
            {"direct", photon_constrained_min_tg(s.cavity->g, s.cavity->n_cav_max, c.c_dd)}};
    write_json(s, "power.json", body);
}

void write_sweep(const Scenario& s, const SweepOutput& out) {
    auto f = open_csv(s, "sweep.csv",
                      "axis_value,protocol,t_g_ns,fbar,error,leakage,v_rms,omega_rms_scaled,n_cav,status");
    for (const SweepRow& r : out.rows) {
        f << num(r.axis_value) << "," << to_string(r.protocol) << ",";
        if (r.result) {
            const SimulationResult& x = *r.result;
            f << num(x.t_g) << "," << num(x.fidelity.fbar) << "," << num(x.fidelity.error) << ","
              << num(x.fidelity.leakage) << "," << num(x.power.v_rms) << ","
              << num(x.power.omega_rms * x.t_g / two_pi) << "," << (x.n_cav ? num(*x.n_cav) : "") << ",ok\n";
        } else {
            std::string msg = r.status;
            for (char& ch : msg)
                if (ch == ',' || ch == '\n') ch = ';';
            f << ",,,,,,," << msg << "\n";
        }
    }
    if (!out.comparisons.empty()) {
        auto g = open_csv(s, "comparison.csv", "v_rms,t_g_satd_ns,t_g_dd_ns,ratio,error_satd,error_dd,zeta");
        for (const ComparisonRow& c : out.comparisons)
            g << num(c.v_rms) << "," << num(c.t_g_satd) << "," << num(c.t_g_dd) << "," << num(c.ratio) << ","
              << num(c.error_satd) << "," << num(c.error_dd) << "," << num(c.zeta) << "\n";
    }
}

void run_cavity(const Scenario& s, const json& extra) {
    if (!s.cavity) throw ValidationError("cavity", "the cavity subcommand needs a cavity section");
    const Prepared prep = prepare(s);
    const SpectrumData& sp = *prep.spectrum;
    const double min_det = two_pi * s.solver.min_detuning_mhz * 1e-3;
    DriveSignal signal;
    if (is_direct(s.gate.protocol)) {
        signal = direct_drive_pulse(sp, prep.trip, s.gate.chi, s.gate.t_g, is_chirped(s.gate.protocol),
                                    s.solver.stark_samples, min_det)
                     .signal;
    } else {
        GateParams p;
        p.alpha = s.gate.alpha;
        p.beta = s.gate.beta;
        p.gamma0 = s.gate.gamma0;
        p.t_g = s.gate.t_g;
        p.t_ramp = s.gate.t_ramp.value_or(0.01 * s.gate.t_g);
        p.omega0 = resolved_omega0(s.gate);
        p.protocol = s.gate.protocol == ProtocolName::Adiabatic ? Protocol::Adiabatic : Protocol::Satd;
        p.chirped = is_chirped(s.gate.protocol);
        signal = tripod_pulse(sp, prep.trip, p, s.solver.stark_samples, min_det).signal;
    }
    const double dt = extra.value("dt_ns", two_pi / signal.max_carrier() / 40.0);
    const CavityDrive cd = cavity_drive(signal, *s.cavity, dt);
    if (s.outputs.csv) {
        auto f = open_csv(s, "cavity_drive.csv", "t_ns,voltage,u");
        for (size_t i = 0; i < cd.t.size(); ++i) f << num(cd.t[i]) << "," << num(cd.v[i]) << "," << num(cd.u[i]) << "\n";
    }
    const double vr = v_rms(signal);
    const CavityCoherence coh = cavity_coherence_times(sp, prep.trip, *s.cavity);
    const DdSatdComparison c = compare_dd_satd(sp, prep.trip, s.gate.alpha, s.gate.chi);
    json body;
    body["v_rms"] = vr;
    body["n_cav"] = vrms_to_photons(vr, s.cavity->g);
    body["v_rms_max"] = photons_to_vrms(s.cavity->n_cav_max, s.cavity->g);
    body["photon_constrained_min_tg_ns"] = {
        {"satd", photon_constrained_min_tg(s.cavity->g, s.cavity->n_cav_max, c.c_satd)},
        {"direct", photon_constrained_min_tg(s.cavity->g, s.cavity->n_cav_max, c.c_dd)}};
    const char* names = "01ae";
    json t1 = json::object();
    for (const auto& tr : coh.t1)
        t1[std::string{names[tr.k], names[tr.l]}] = {
            {"t1_s", std::isfinite(tr.t1_s) ? json(tr.t1_s) : json(nullptr)},
            {"detuning_ghz", rad_ns_to_ghz(tr.detuning)},
            {"dispersive_ratio", tr.dispersive_ratio}};
    body["purcell"] = t1;
    body["t2_cav_s"] = std::isfinite(coh.t2_s) ? json(coh.t2_s) : json(nullptr);
    body["warnings"] = coh.warnings;
    write_json(s, "cavity.json", body);
}

}  // namespace

int run(const std::string& sub, const Scenario& s, int workers, const json& extra_in) {
    const json extra = extra_in.is_object() ? extra_in : json::object();
    if (sub == "spectrum") {
        run_spectrum(s, extra);
    } else if (sub == "pulses") {
        run_pulses(s, extra);
    } else if (sub == "power") {
        run_power(s, extra);
    } else if (sub == "simulate") {
        Scenario one = s;
        one.sweep.reset();
        write_json(s, "report.json", to_json(simulate(one, workers)));
    } else if (sub == "sweep") {
        write_sweep(s, sweep_runner(s, workers));
    } else if (sub == "cavity") {
        run_cavity(s, extra);
    } else {
        throw Error("cli", "unknown subcommand " + sub);
    }
    return 0;
}

}  // namespace satd

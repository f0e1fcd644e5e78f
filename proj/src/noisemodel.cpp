#include "satd/noisemodel.hpp"

#include <cmath>

#include <fmt/format.h>

namespace satd {

namespace {

const RVec& dispersions(const SpectrumData& s) {
    if (s.flux_dispersion.size() != s.levels)
        throw Error("noisemodel", "spectrum carries no flux dispersions");
    return s.flux_dispersion;
}

int sgn(double x) { return (x > 0) - (x < 0); }

}  // namespace

void NoiseModel::validate() const {
    if (!(a_flux >= 0)) throw Error("noisemodel", "a_flux must be non-negative");
    if (!(d_factor > 0) || !(d_factor < 1)) throw Error("noisemodel", "d_factor must lie in (0, 1)");
    if (q_diel && !(*q_diel > 0)) throw Error("noisemodel", "q_diel must be positive");
    if (!(temperature >= 0)) throw Error("noisemodel", "temperature must be non-negative");
}

bool DissipatorSet::empty() const { return (z.size() == 0 || z.cwiseAbs().maxCoeff() == 0.0) && jumps.empty(); }

CMat DissipatorSet::z_matrix() const { return z.cast<cplx>().asDiagonal(); }

std::vector<CMat> DissipatorSet::collapse_matrices(int n) const {
    std::vector<CMat> out;
    for (const JumpOp& j : jumps) {
        CMat c = CMat::Zero(n, n);
        c(j.to, j.from) = std::sqrt(j.rate);
        out.push_back(std::move(c));
    }
    return out;
}

std::optional<double> dephasing_time(const SpectrumData& s, const NoiseModel& m, int k, int l) {
    m.validate();
    if (k == l) throw Error("noisemodel", "dephasing_time needs two distinct levels");
    const RVec& d = dispersions(s);
    const double rate = m.a_flux * std::abs(d[k] - d[l]) * std::sqrt(std::abs(std::log(m.d_factor)));
    if (rate == 0.0) return std::nullopt;
    return 1.0 / rate * 1e-3;
}

DissipatorSet lindblad_rates(const SpectrumData& s, const NoiseModel& m, double t_g) {
    if (!(t_g > 0)) throw Error("noisemodel", "t_g must be positive");
    const RVec& d = dispersions(s);
    const int ref = m.reference_level;
    DissipatorSet out;
    out.z = RVec::Zero(s.levels);
    out.gamma = RVec::Zero(s.levels);
    for (int k = 0; k < s.levels; ++k) {
        if (k == ref) continue;
        const auto t_us = dephasing_time(s, m, k, ref);
        if (!t_us) continue;
        const double t_ns = *t_us * 1e3;
        out.gamma[k] = t_g / (t_ns * t_ns);
        out.z[k] = sgn(d[k] - d[ref]) * std::sqrt(2.0 * out.gamma[k]);
        out.ledger.push_back(fmt::format("dephasing level {}: T_phi = {:.4f} us, Gamma = {:.4e} /ns, sign {:+d}", k,
                                         *t_us, out.gamma[k], sgn(d[k] - d[ref])));
    }
    return out;
}

std::vector<EffectiveDephasingRow> effective_dephasing_table(const SpectrumData& s, const NoiseModel& m,
                                                             const std::vector<std::pair<int, int>>& pairs) {
    const RVec& d = dispersions(s);
    const int ref = m.reference_level;
    // Signed 1/sqrt(T) and signed 1/T for each level relative to the reference (ns units).
    auto term = [&](int k, bool root) {
        if (k == ref) return 0.0;
        const auto t = dephasing_time(s, m, k, ref);
        if (!t) return 0.0;
        const double tn = *t * 1e3;
        return sgn(d[k] - d[ref]) * (root ? 1.0 / std::sqrt(tn) : 1.0 / tn);
    };
    std::vector<EffectiveDephasingRow> rows;
    for (auto [k, l] : pairs) {
        EffectiveDephasingRow r{k, l, dephasing_time(s, m, k, l), std::nullopt, std::nullopt, "exact"};
        const double a = term(k, true) - term(l, true);
        if (a != 0.0) r.t_eff_us = 1e-3 / (a * a);
        const double b = std::abs(term(k, false) - term(l, false));
        if (b != 0.0) r.t_lindblad_us = 1e-3 / b;
        if (r.t_free_us && r.t_eff_us) {
            const double rel = (*r.t_eff_us - *r.t_free_us) / *r.t_free_us;
            if (rel < -1e-9) r.flag = "overestimated";
            else if (rel > 1e-9) r.flag = "underestimated";
        }
        rows.push_back(r);
    }
    return rows;
}

T1Channel t1_dielectric(const SpectrumData& s, const NoiseModel& m, int k, int l) {
    if (!m.q_diel) throw Error("noisemodel", "t1_dielectric needs q_diel");
    const double w = s.energies[k] - s.energies[l];
    if (!(w > 0)) throw Error("noisemodel", "decay requires eps_k > eps_l");
    const double thermal = m.temperature > 0 ? 1.0 / std::tanh(w / (2.0 * m.temperature)) + 1.0 : 2.0;
    const double rate = w * w / (8.0 * s.e_c * *m.q_diel) * thermal * std::norm(s.phase_elems(l, k));
    T1Channel c{std::nullopt, {k, l, rate}};
    if (rate > 0) c.t1_us = 1e-3 / rate;
    return c;
}

DissipatorSet build_dissipators(const SpectrumData& s, const TripodAssignment& trip, const NoiseModel& m,
                                double t_window) {
    DissipatorSet out = lindblad_rates(s, m, t_window);
    if (!m.q_diel) return out;
    auto add = [&](int k, int l) {
        const T1Channel c = t1_dielectric(s, m, k, l);
        if (c.op.rate <= 0) return;
        out.jumps.push_back(c.op);
        out.ledger.push_back(fmt::format("T1 {} -> {}: {:.4f} us", k, l, *c.t1_us));
    };
    if (m.all_t1_channels) {
        for (int k = 1; k < s.levels; ++k)
            for (int l = 0; l < k; ++l) add(k, l);
    } else {
        add(trip.idx_e, trip.idx1);
    }
    return out;
}

}  // namespace satd

#include <cmath>
#include <map>

#include "eskin/fields.hpp"

namespace eskin::fields {

namespace {

// Wires are segmented on one shared rest-frame y grid (cell k covers
// [k*ds, (k+1)*ds] in body y), so two wires face each other exactly on the
// cells both occupy; non-facing cells have zero overlap length.
struct Segment {
    Vec3 mid;         // deformed midpoint
    double arc;       // deformed length
    double rest_len;  // rest-frame length inside the cell
};

std::map<int, Segment> wire_segments(const geometry::DeformationField& state, int electrode,
                                     double ds) {
    const geometry::ManipulatorGeometry& g = state.geom();
    int w = electrode % 4;
    geometry::Face f = electrode < 4 ? geometry::Face::Front : geometry::Face::Back;
    double x = g.wire_x[w];
    double y0 = g.wire_y0[w], y1 = g.wire_y1[w];

    std::map<int, Segment> out;
    for (int k = static_cast<int>(std::floor(y0 / ds));; ++k) {
        double lo = std::max(y0, k * ds), hi = std::min(y1, (k + 1) * ds);
        if (lo >= y1 - 1e-12) break;
        if (hi - lo < 1e-9) continue;
        Vec3 a = state.face_point(f, x, lo);
        Vec3 b = state.face_point(f, x, hi);
        out.emplace(k, Segment{(a + b) * 0.5, dist(a, b), hi - lo});
    }
    return out;
}

double point_segment_dist(const Vec3& p, const Vec3& a, const Vec3& b) {
    Vec3 ab = b - a;
    double len2 = ab.dot(ab);
    if (len2 < 1e-18) return dist(p, a);
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return dist(p, a + ab * t);
}

}  // namespace

LumpedBackend::LumpedBackend(const geometry::ManipulatorGeometry& geom, const Config& cfg)
    : geom_(&geom), cfg_(cfg) {
    c0_.fill(1.0);
    u0_.fill(1.0);
    gamma_.fill(1.0);
}

void LumpedBackend::set_scale(const std::array<double, sensing::kPairs>& scale) {
    c0_ = scale;
    u0_.fill(1.0);
    gamma_.fill(1.0);
    calibrated_ = true;
}

double LumpedBackend::map_pair(int flat, double unit) const {
    return c0_[flat] * std::pow(unit / u0_[flat], gamma_[flat]);
}

double LumpedBackend::unit_pair_value(const geometry::DeformationField& state, int flat,
                                      bool with_touch_boost) const {
    auto [ei, ej] = sensing::pair_electrodes(flat);
    std::map<int, Segment> a = wire_segments(state, ei - 1, cfg_.segment_length);
    std::map<int, Segment> b = wire_segments(state, ej - 1, cfg_.segment_length);

    const bool touch = with_touch_boost && state.touched() && state.force() > 0;
    const double R = touch ? state.touch().contact_radius : 0;
    const double couple = touch ? std::min(1.0, state.force() / cfg_.finger_force_sat) : 0;
    const Vec3 finger = state.finger_center_rest();

    double sum = 0;
    for (const auto& [k, sa] : a) {
        auto it = b.find(k);
        if (it == b.end()) continue;
        const Segment& sb = it->second;
        double d = dist(sa.mid, sb.mid);
        if (d < 1e-9) throw numeric_error("lumped: degenerate zero-distance segment pair");
        double overlap = std::min(sa.rest_len, sb.rest_len);
        double arc_gain = 0.5 * (sa.arc / sa.rest_len + sb.arc / sb.rest_len);

        // background permittivity: harmonic mean along the gap line, each
        // sample averaged across the face (gap lines between same-face wires
        // run on the surface; the field sees substrate and air half-spaces)
        const Vec3 probe{0, 0, cfg_.eps_probe_offset};
        double inv = 0;
        for (int q = 0; q < cfg_.gap_samples; ++q) {
            double f = (q + 0.5) / cfg_.gap_samples;
            Vec3 p = sa.mid + (sb.mid - sa.mid) * f;
            double e = 0.5 * (state.eps_material_at(p + probe) +
                              state.eps_material_at(p - probe));
            inv += 1.0 / e;
        }
        double eps_eff = cfg_.gap_samples / inv;

        // touch raises the effective permittivity of segments near the
        // contact, with a smooth falloff over the contact radius
        if (touch) {
            double df = point_segment_dist(state.bend_map(finger), sa.mid, sb.mid);
            double tail = std::max(0.0, df - R) / (R / 2);
            double kern = std::exp(-tail * tail);
            eps_eff *= 1.0 + cfg_.touch_gain * couple * kern;
        }
        sum += overlap * arc_gain * eps_eff / std::pow(d, cfg_.distance_exponent);
    }
    return sum;
}

void LumpedBackend::calibrate_to_fd() {
    geometry::DeformationField rest(*geom_, geometry::InflationState{},
                                    geometry::TouchSpec::none(), 0.0);
    FdBackend fd(cfg_);
    sensing::CapacitanceFrame anchor = fd.raw_frame(rest);
    for (int k = 0; k < sensing::kPairs; ++k) {
        double unit = unit_pair_value(rest, k);
        if (unit <= 0 || anchor.c[k] <= 0)
            throw numeric_error("lumped: non-positive rest value during calibration");
        scale_[k] = anchor.c[k] / unit;
    }
    calibrated_ = true;
}

sensing::CapacitanceFrame LumpedBackend::raw_frame(const geometry::DeformationField& state) const {
    sensing::CapacitanceFrame out;
    out.kind = sensing::FrameKind::Raw;
    for (int k = 0; k < sensing::kPairs; ++k) out.c[k] = scale_[k] * unit_pair_value(state, k);

    // Soft-field renormalization: the finger adds coupling locally but the
    // excitation flux it captures is diverted from an electrode's other
    // pairs. Per-electrode totals are compared against the boost-free frame
    // and every pair is scaled down by its electrodes' growth.
    if (state.touched() && state.force() > 0 && cfg_.touch_steal > 0) {
        std::array<double, sensing::kElectrodes> grown, base;
        grown.fill(0);
        base.fill(0);
        for (int k = 0; k < sensing::kPairs; ++k) {
            auto [i, j] = sensing::pair_electrodes(k);
            double nob = scale_[k] * unit_pair_value(state, k, false);
            grown[i - 1] += out.c[k];
            grown[j - 1] += out.c[k];
            base[i - 1] += nob;
            base[j - 1] += nob;
        }
        for (int k = 0; k < sensing::kPairs; ++k) {
            auto [i, j] = sensing::pair_electrodes(k);
            double s = (grown[i - 1] / base[i - 1]) * (grown[j - 1] / base[j - 1]);
            out.c[k] /= std::pow(s, cfg_.touch_steal);
        }
    }
    return out;
}

}  // namespace eskin::fields

#include "eskin/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace eskin::geometry {

namespace {

double smoothstep(double u) {
    if (u <= 0) return 0;
    if (u >= 1) return 1;
    return u * u * (3 - 2 * u);
}

}  // namespace

ManipulatorGeometry ManipulatorGeometry::from_config(const Config& cfg) {
    ManipulatorGeometry g;
    g.cfg = cfg;

    double cx0 = (cfg.body_width - cfg.chamber_width) / 2;
    for (int c = 0; c < 3; ++c) {
        double y0 = cfg.chamber_gap + c * (cfg.chamber_length + cfg.chamber_gap);
        g.chambers[c] = Rect{cx0, y0, cx0 + cfg.chamber_width, y0 + cfg.chamber_length};
    }

    g.skin = Rect{cfg.skin_offset_x, cfg.skin_offset_y, cfg.skin_offset_x + cfg.skin_width,
                  cfg.skin_offset_y + cfg.skin_length};

    // wire_layout entries "95b" / "45t" / "20@60" in lateral order, lateral
    // positions from wire_x_offsets (skin frame)
    {
        auto split = [](const std::string& s) {
            std::vector<std::string> items;
            size_t pos = 0;
            while (pos <= s.size()) {
                size_t comma = s.find(',', pos);
                if (comma == std::string::npos) {
                    items.push_back(s.substr(pos));
                    break;
                }
                items.push_back(s.substr(pos, comma - pos));
                pos = comma + 1;
            }
            return items;
        };
        std::vector<std::string> layout = split(cfg.wire_layout);
        std::vector<std::string> offsets = split(cfg.wire_x_offsets);
        if (layout.size() != 4 || offsets.size() != 4)
            throw config_error("wire_layout / wire_x_offsets need exactly 4 entries");

        std::array<double, 4> lens{};
        for (int k = 0; k < 4; ++k) {
            const std::string& item = layout[k];
            double x_off = std::stod(offsets[k]);
            if (x_off < 0 || x_off > cfg.skin_width)
                throw config_error("wire_x_offsets: centerline outside skin");
            g.wire_x[k] = cfg.skin_offset_x + x_off;

            size_t at = item.find('@');
            double len = 0, start = 0;
            if (at != std::string::npos) {
                len = std::stod(item.substr(0, at));
                start = std::stod(item.substr(at + 1));
            } else if (!item.empty() && (item.back() == 'b' || item.back() == 't')) {
                len = std::stod(item.substr(0, item.size() - 1));
                start = item.back() == 'b' ? cfg.wire_base_y
                                           : cfg.skin_length - cfg.wire_base_y - len;
            } else {
                throw config_error("wire_layout: entries must look like '95b', '45t' or '20@60'");
            }
            if (start < 0 || start + len > cfg.skin_length)
                throw config_error("wire_layout: wire leaves the skin rectangle");
            lens[k] = len;
            g.wire_length[k] = len;
            g.wire_y0[k] = cfg.skin_offset_y + start;
            g.wire_y1[k] = g.wire_y0[k] + len;
        }
        std::array<double, 4> sorted = lens;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != std::array<double, 4>{20, 45, 70, 95})
            throw config_error("wire_layout: lengths must be {20,45,70,95} in some order");
    }

    for (int m = 0; m < 5; ++m)
        g.marker_rest[m] = Vec3{cfg.marker_edge_x, cfg.marker_y0 + m * cfg.marker_pitch, 0};

    double zf = cfg.body_thickness / 2;
    for (int e = 0; e < 8; ++e) {
        int k = e % 4;
        double z = e < 4 ? zf : -zf;
        g.electrode_centroid[e] = Vec3{g.wire_x[k], (g.wire_y0[k] + g.wire_y1[k]) / 2, z};
    }
    return g;
}

int ManipulatorGeometry::subregion_of(double sx, double sy, Face face) const {
    if (sx < 0 || sx > cfg.skin_width || sy < 0 || sy > cfg.skin_length)
        throw data_error("subregion_of: point outside skin rectangle");
    int col = std::min(2, static_cast<int>(sx / (cfg.skin_width / 3)));
    int row = std::min(2, static_cast<int>(sy / (cfg.skin_length / 3)));
    int idx = 1 + 3 * row + col;
    return face == Face::Front ? idx : idx + 9;
}

Rect ManipulatorGeometry::subregion_rect(int index) const {
    if (index < 1 || index > 18) throw data_error("subregion_rect: index out of range");
    int i = (index - 1) % 9;
    int row = i / 3, col = i % 3;
    double cw = cfg.skin_width / 3, ch = cfg.skin_length / 3;
    return Rect{col * cw, row * ch, (col + 1) * cw, (row + 1) * ch};
}

bool ManipulatorGeometry::subregions_adjacent(int a, int b) {
    if (a < 1 || a > 18 || b < 1 || b > 18) return false;
    bool a_front = a <= 9, b_front = b <= 9;
    if (a_front != b_front) return false;
    int ia = (a - 1) % 9, ib = (b - 1) % 9;
    int dr = std::abs(ia / 3 - ib / 3), dc = std::abs(ia % 3 - ib % 3);
    return dr + dc == 1;
}

DeformationField::DeformationField(const ManipulatorGeometry& geom, const InflationState& p,
                                   const TouchSpec& touch, double t)
    : geom_(&geom), touch_(touch) {
    const Config& cfg = geom.cfg;
    for (int c = 0; c < 3; ++c) {
        if (p.p[c] < 0 || p.p[c] > cfg.max_inflation_ml)
            throw data_error("deform: inflation volume out of [0, " +
                             format_double(cfg.max_inflation_ml) + "] ml");
        // Injected volume (ml -> mm^3) split across both faces; the lateral
        // plateau-with-taper integrates to (width - taper), the raised cosine
        // along the chamber to length/2.
        double ix = cfg.chamber_width - cfg.bump_taper;
        double iy = cfg.chamber_length / 2;
        amp_[c] = p.p[c] * 1000.0 / (2.0 * ix * iy);
    }

    has_touch_ = touch.subregion >= 1;
    if (has_touch_) {
        if (touch.subregion > 18) throw data_error("deform: sub-region index out of range");
        Rect r = geom.subregion_rect(touch.subregion);
        if (!(touch.center_x >= r.x0 && touch.center_x <= r.x1 && touch.center_y >= r.y0 &&
              touch.center_y <= r.y1))
            throw data_error("deform: contact center outside its declared sub-region");
        if (t < 0) throw data_error("deform: negative time");
        force_n_ = touch.force_at(t);
        dent_depth_ = cfg.contact_stiffness * force_n_;
        hinge_y_ = cfg.skin_offset_y + touch.center_y;
        // Touch pushes the distal half away from the toucher.
        double sign = touch.face() == Face::Front ? -1.0 : 1.0;
        theta_ = sign * cfg.bend_per_newton * force_n_;

        double bx = cfg.skin_offset_x + touch.center_x;
        double by = hinge_y_;
        double w = inflation_offset(bx, by) - dent_depth_;
        double z = cfg.body_thickness / 2 + w;
        finger_center_ = Vec3{bx, by, touch.face() == Face::Front ? z : -z};
    }
}

double DeformationField::inflation_offset(double x, double y) const {
    const Config& cfg = geom_->cfg;
    double w = 0;
    for (int c = 0; c < 3; ++c) {
        if (amp_[c] == 0) continue;
        const Rect& r = geom_->chambers[c];
        if (x <= r.x0 || x >= r.x1 || y <= r.y0 || y >= r.y1) continue;
        double tpr = cfg.bump_taper;
        double sx = std::min(smoothstep((x - r.x0) / tpr), smoothstep((r.x1 - x) / tpr));
        double cy = 0.5 * (1 - std::cos(2 * M_PI * (y - r.y0) / r.height()));
        w += amp_[c] * sx * cy;
    }
    return w;
}

double DeformationField::dent(Face f, double x, double y) const {
    if (!has_touch_ || dent_depth_ == 0 || f != touch_.face()) return 0;
    const Config& cfg = geom_->cfg;
    double dx = x - (cfg.skin_offset_x + touch_.center_x);
    double dy = y - hinge_y_;
    double u2 = (dx * dx + dy * dy) / (touch_.contact_radius * touch_.contact_radius);
    if (u2 >= 1) return 0;
    double q = (1 - u2) * (1 - u2);
    return dent_depth_ * q;
}

double DeformationField::face_offset(Face f, double x, double y) const {
    return inflation_offset(x, y) - dent(f, x, y);
}

double DeformationField::bend_angle(double y) const {
    if (theta_ == 0) return 0;
    const double band = geom_->cfg.bend_band;
    return theta_ * smoothstep((y - hinge_y_) / band + 0.5);
}

Vec3 DeformationField::bend_map(const Vec3& rest) const {
    double a = bend_angle(rest.y);
    if (a == 0) return rest;
    double dy = rest.y - hinge_y_, dz = rest.z;
    double c = std::cos(a), s = std::sin(a);
    return Vec3{rest.x, hinge_y_ + dy * c - dz * s, dy * s + dz * c};
}

Vec3 DeformationField::bend_unmap(const Vec3& world) const {
    if (theta_ == 0) return world;
    Vec3 q = world;
    for (int it = 0; it < 3; ++it) {
        double a = bend_angle(q.y);
        double c = std::cos(a), s = std::sin(a);
        double dy = world.y - hinge_y_, dz = world.z;
        q = Vec3{world.x, hinge_y_ + dy * c + dz * s, -dy * s + dz * c};
    }
    return q;
}

Vec3 DeformationField::face_point(Face f, double x, double y) const {
    double zf = geom_->cfg.body_thickness / 2 + face_offset(f, x, y);
    Vec3 rest{x, y, f == Face::Front ? zf : -zf};
    return bend_map(rest);
}

std::vector<Vec3> DeformationField::electrode_path(int electrode, double ds) const {
    int k = electrode % 4;
    Face f = electrode < 4 ? Face::Front : Face::Back;
    double x = geom_->wire_x[k];
    double y0 = geom_->wire_y0[k], y1 = geom_->wire_y1[k];
    int n = std::max(2, static_cast<int>(std::ceil((y1 - y0) / ds)) + 1);
    std::vector<Vec3> path(n);
    for (int i = 0; i < n; ++i) {
        double y = y0 + (y1 - y0) * i / (n - 1);
        path[i] = face_point(f, x, y);
    }
    return path;
}

std::vector<std::vector<Vec3>> DeformationField::electrode_paths(double ds) const {
    std::vector<std::vector<Vec3>> out(8);
    for (int e = 0; e < 8; ++e) out[e] = electrode_path(e, ds);
    return out;
}

std::array<Vec3, 5> DeformationField::marker_positions() const {
    std::array<Vec3, 5> out;
    for (int m = 0; m < 5; ++m) out[m] = bend_map(geom_->marker_rest[m]);
    return out;
}

double DeformationField::eps_at(const Vec3& world) const {
    const Config& cfg = geom_->cfg;
    Vec3 q = bend_unmap(world);

    if (has_touch_ && force_n_ > 0) {
        Vec3 d = q - finger_center_;
        double r2 = d.x * d.x + d.y * d.y + d.z * d.z;
        double R = touch_.contact_radius;
        bool outside_half = touch_.face() == Face::Front ? d.z >= 0 : d.z <= 0;
        if (r2 <= R * R && outside_half) {
            double couple = std::min(1.0, force_n_ / cfg.finger_force_sat);
            return 1.0 + (touch_.finger_rel_permittivity - 1.0) * couple;
        }
    }
    return material_eps(q);
}

double DeformationField::eps_material_at(const Vec3& world) const {
    return material_eps(bend_unmap(world));
}

double DeformationField::material_eps(const Vec3& q) const {
    const Config& cfg = geom_->cfg;
    if (q.x < 0 || q.x > cfg.body_width || q.y < 0 || q.y > cfg.body_length) return 1.0;
    double zf = cfg.body_thickness / 2 + face_offset(Face::Front, q.x, q.y);
    double zb = -(cfg.body_thickness / 2 + face_offset(Face::Back, q.x, q.y));
    if (q.z > zf || q.z < zb) return 1.0;

    for (const Rect& r : geom_->chambers) {
        if (r.contains(q.x, q.y)) {
            if (q.z < zf - cfg.wall_thickness && q.z > zb + cfg.wall_thickness) return 1.0;
            return cfg.eps_silicone;
        }
    }
    return cfg.eps_silicone;
}

DeformationField deform(const ManipulatorGeometry& geom, const InflationState& p,
                        const TouchSpec& touch, double t) {
    return DeformationField(geom, p, touch, t);
}

}  // namespace eskin::geometry

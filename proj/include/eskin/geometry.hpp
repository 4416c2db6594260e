#pragma once
// Parametric manipulator + e-skin model: rest layout, inflation bumps, touch
// indentation, touch-induced bending, marker kinematics, and the material
// (permittivity) model shared by both capacitance backends.

#include <array>
#include <functional>
#include <vector>

#include "eskin/common.hpp"
#include "eskin/config.hpp"

namespace eskin::geometry {

enum class Face { Front, Back };

struct Rect {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    bool contains(double x, double y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

// Injected air volume per chamber, ml.
struct InflationState {
    std::array<double, 3> p{0, 0, 0};

    InflationState() = default;
    InflationState(double p1, double p2, double p3) : p{p1, p2, p3} {}
    bool is_zero() const { return p[0] == 0 && p[1] == 0 && p[2] == 0; }
};

struct TouchSpec {
    int subregion = 0;  // 0 = no touch, 1..9 front, 10..18 back
    double center_x = 0, center_y = 0;  // skin-local mm, valid when subregion >= 1
    double contact_radius = 8.0;
    double finger_rel_permittivity = 35.0;
    std::function<double(double)> force;  // N at time t; empty means zero

    static TouchSpec none() { return TouchSpec{}; }
    Face face() const { return subregion <= 9 ? Face::Front : Face::Back; }
    double force_at(double t) const { return (subregion >= 1 && force) ? force(t) : 0.0; }
};

struct ManipulatorGeometry {
    Config cfg;
    std::array<Rect, 3> chambers;            // body frame
    std::array<double, 4> wire_x;            // body-frame lateral centerlines
    std::array<double, 4> wire_length;       // {20, 45, 70, 95} in layout order
    std::array<double, 4> wire_y0;           // body-frame span start per wire
    std::array<double, 4> wire_y1;           // span end
    Rect skin;                               // body frame
    std::array<Vec3, 5> marker_rest;         // world = body frame at rest
    std::array<Vec3, 8> electrode_centroid;  // rest frame, 0..3 front / 4..7 back

    static ManipulatorGeometry from_config(const Config& cfg);

    // 1..18; skin-local coordinates, cells closed-low / open-high, outer high
    // edge folded into the last cell. Throws on points outside the skin.
    int subregion_of(double skin_x, double skin_y, Face face) const;
    Rect subregion_rect(int index) const;  // skin-local
    static bool subregions_adjacent(int a, int b);

    double front_z() const { return cfg.body_thickness / 2; }
};

// Snapshot of the deformed state at one instant. Pure value object; all
// queries are const and thread-safe.
class DeformationField {
  public:
    DeformationField(const ManipulatorGeometry& geom, const InflationState& p,
                     const TouchSpec& touch, double t);

    // Outward normal offset of a face at body-frame (x, y); includes the
    // inflation bump and the touch indentation (which can make it negative).
    double face_offset(Face f, double x, double y) const;

    // World position of the face material point at body-frame (x, y).
    Vec3 face_point(Face f, double x, double y) const;

    // All 8 electrode centerlines as world-frame polylines sampled at ds mm.
    std::vector<std::vector<Vec3>> electrode_paths(double ds) const;
    std::vector<Vec3> electrode_path(int electrode, double ds) const;

    std::array<Vec3, 5> marker_positions() const;

    // Relative permittivity at a world point: air / silicone shell /
    // chamber cavity / finger tissue.
    double eps_at(const Vec3& world) const;

    // Same, but without the finger half-ball (body materials only).
    double eps_material_at(const Vec3& world) const;

    Vec3 bend_map(const Vec3& rest) const;
    Vec3 bend_unmap(const Vec3& world) const;

    // Zeroes the distal rotation. Bending is a near-isometry of the distal
    // half (it moves markers but barely changes pair geometry); the voxel
    // backend rasterizes with it suppressed to avoid staircase artifacts on
    // tilted surfaces at coarse spacing.
    void suppress_bend() { theta_ = 0; }

    double force() const { return force_n_; }
    bool touched() const { return touch_.subregion >= 1; }
    const TouchSpec& touch() const { return touch_; }
    const ManipulatorGeometry& geom() const { return *geom_; }
    Vec3 finger_center_rest() const { return finger_center_; }
    double bump_amplitude(int chamber) const { return amp_[chamber]; }

  private:
    double inflation_offset(double x, double y) const;  // bump only, either face
    double dent(Face f, double x, double y) const;
    double bend_angle(double y) const;
    double material_eps(const Vec3& rest) const;

    const ManipulatorGeometry* geom_;
    TouchSpec touch_;
    std::array<double, 3> amp_{0, 0, 0};  // bump amplitude per chamber, per face
    double force_n_ = 0;
    double dent_depth_ = 0;
    double hinge_y_ = 0;
    double theta_ = 0;          // signed distal rotation, rad
    Vec3 finger_center_;        // rest frame, on the dented surface
    bool has_touch_ = false;
};

DeformationField deform(const ManipulatorGeometry& geom, const InflationState& p,
                        const TouchSpec& touch, double t);

}  // namespace eskin::geometry

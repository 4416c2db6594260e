#include <cmath>

#include "eskin/fields.hpp"

namespace eskin::fields {

namespace {

struct Ivec {
    int i, j, k;
    bool operator==(const Ivec& o) const { return i == o.i && j == o.j && k == o.k; }
};

}  // namespace

Raster rasterize(const geometry::DeformationField& state_in, const Config& cfg) {
    geometry::DeformationField state = state_in;
    state.suppress_bend();
    const double h = cfg.grid_spacing;
    const double m = cfg.grid_margin;
    // Extents are config-only (max inflation, not the current state) so that
    // grids from consecutive frames are shape-compatible for warm starts.
    double amp_max = cfg.max_inflation_ml * 1000.0 /
                     (2.0 * (cfg.chamber_width - cfg.bump_taper) * (cfg.chamber_length / 2));
    double half_z = cfg.body_thickness / 2 + amp_max + m;

    Raster r;
    VoxelGrid& g = r.grid;
    g.h = h;
    g.nx = static_cast<int>(std::ceil((cfg.body_width + 2 * m) / h));
    g.ny = static_cast<int>(std::ceil((cfg.body_length + 2 * m) / h));
    g.nz = static_cast<int>(std::ceil(2 * half_z / h));
    g.origin = Vec3{cfg.body_width / 2 - g.nx * h / 2, cfg.body_length / 2 - g.ny * h / 2,
                    -g.nz * h / 2};

    g.eps.resize(g.size());
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                g.eps[g.index(i, j, k)] = state.eps_at(g.center(i, j, k));

    auto voxel_of = [&](const Vec3& p) -> Ivec {
        int i = static_cast<int>(std::floor((p.x - g.origin.x) / h));
        int j = static_cast<int>(std::floor((p.y - g.origin.y) / h));
        int k = static_cast<int>(std::floor((p.z - g.origin.z) / h));
        if (i < 1 || i >= g.nx - 1 || j < 1 || j >= g.ny - 1 || k < 1 || k >= g.nz - 1)
            throw data_error("rasterize: electrode leaves the grid (increase grid_margin)");
        return {i, j, k};
    };

    ElectrodeMask& mask = r.mask;
    mask.sets.resize(sensing::kElectrodes);
    std::vector<int16_t> claimed(g.size(), -1);
    for (int e = 0; e < sensing::kElectrodes; ++e) {
        std::vector<Vec3> path = state.electrode_path(e, h / 3);
        Ivec prev{-1, -1, -1};
        auto add = [&](Ivec v) {
            int64_t idx = g.index(v.i, v.j, v.k);
            if (claimed[idx] == e) return;
            if (claimed[idx] != -1)
                throw data_error("rasterize: electrodes collide in one voxel");
            claimed[idx] = static_cast<int16_t>(e);
            mask.sets[e].push_back(idx);
            // wires are embedded in the skin
            g.eps[idx] = cfg.eps_silicone;
        };
        for (const Vec3& p : path) {
            Ivec v = voxel_of(p);
            if (prev.i < 0) {
                add(v);
            } else if (!(v == prev)) {
                // bridge axis by axis so the set stays face-connected
                Ivec c = prev;
                while (!(c == v)) {
                    if (c.i != v.i)
                        c.i += c.i < v.i ? 1 : -1;
                    else if (c.j != v.j)
                        c.j += c.j < v.j ? 1 : -1;
                    else
                        c.k += c.k < v.k ? 1 : -1;
                    add(c);
                }
            }
            prev = v;
        }
    }
    mask.finalize(g);
    g.validate();
    return r;
}

sensing::CapacitanceFrame FdBackend::raw_frame(const geometry::DeformationField& state) {
    Raster r = rasterize(state, cfg_);
    SolverOptions opt{cfg_.solver_tol, cfg_.solver_max_iter};
    return capacitance_frame(r.grid, r.mask, opt, &cache_);
}

}  // namespace eskin::fields

#include <algorithm>
#include <cmath>
#include <cstring>
#include <queue>

#include "eskin/fields.hpp"

namespace eskin::fields {

void VoxelGrid::validate() const {
    if (nx < 3 || ny < 3 || nz < 3) throw data_error("grid: dims must be >= 3 in every axis");
    if (h <= 0) throw data_error("grid: spacing must be positive");
    if (static_cast<int64_t>(eps.size()) != size()) throw data_error("grid: eps size mismatch");
    for (double e : eps)
        if (!(e >= 1.0f)) throw data_error("grid: permittivity must be >= 1 everywhere");
}

void ElectrodeMask::finalize(const VoxelGrid& grid) {
    owner.assign(grid.size(), -1);
    centroids.assign(sets.size(), Vec3{});
    for (size_t e = 0; e < sets.size(); ++e) {
        if (sets[e].empty()) throw data_error("mask: electrode set " + std::to_string(e) + " empty");
        Vec3 c{};
        for (int64_t v : sets[e]) {
            if (v < 0 || v >= grid.size()) throw data_error("mask: voxel index out of range");
            if (owner[v] != -1) throw data_error("mask: electrode sets overlap");
            owner[v] = static_cast<int16_t>(e);
            int i = static_cast<int>(v % grid.nx);
            int j = static_cast<int>((v / grid.nx) % grid.ny);
            int k = static_cast<int>(v / (int64_t(grid.nx) * grid.ny));
            c += grid.center(i, j, k);
        }
        centroids[e] = c * (1.0 / sets[e].size());
    }
    // face-connectivity per electrode (BFS over the 6-neighborhood)
    const int64_t sx = 1, sy = grid.nx, sz = int64_t(grid.nx) * grid.ny;
    for (size_t e = 0; e < sets.size(); ++e) {
        std::vector<int64_t> sorted = sets[e];
        std::sort(sorted.begin(), sorted.end());
        std::vector<char> seen(sorted.size(), 0);
        std::queue<int64_t> q;
        q.push(sorted[0]);
        seen[0] = 1;
        size_t reached = 1;
        auto find = [&](int64_t v) {
            auto it = std::lower_bound(sorted.begin(), sorted.end(), v);
            return (it != sorted.end() && *it == v) ? int(it - sorted.begin()) : -1;
        };
        while (!q.empty()) {
            int64_t v = q.front();
            q.pop();
            int i = static_cast<int>(v % grid.nx);
            int j = static_cast<int>((v / grid.nx) % grid.ny);
            int k = static_cast<int>(v / sz);
            const int64_t nb[6] = {v - sx, v + sx, v - sy, v + sy, v - sz, v + sz};
            const bool ok[6] = {i > 0, i < grid.nx - 1, j > 0, j < grid.ny - 1,
                                k > 0, k < grid.nz - 1};
            for (int d = 0; d < 6; ++d) {
                if (!ok[d]) continue;
                int s = find(nb[d]);
                if (s >= 0 && !seen[s]) {
                    seen[s] = 1;
                    ++reached;
                    q.push(nb[d]);
                }
            }
        }
        if (reached != sorted.size())
            throw data_error("mask: electrode " + std::to_string(e) + " is not face-connected");
    }
}

namespace {

inline double face_eps(double a, double b) { return 2.0 * a * b / (a + b); }

// Stencil application on free voxels: out = A x (x ignored on electrodes).
// A is the negated discrete divergence: diag*x_v - sum(eps_f * x_nb).
struct Stencil {
    const VoxelGrid* g;
    const int16_t* owner;
    std::vector<double> diag;  // 1.0 on electrode voxels

    void build() {
        const VoxelGrid& grid = *g;
        diag.assign(grid.size(), 1.0);
        const int64_t sy = grid.nx, sz = int64_t(grid.nx) * grid.ny;
        for (int k = 0; k < grid.nz; ++k)
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    int64_t v = grid.index(i, j, k);
                    if (owner[v] >= 0) continue;
                    double d = 0;
                    double ev = grid.eps[v];
                    if (i > 0) d += face_eps(ev, grid.eps[v - 1]);
                    if (i < grid.nx - 1) d += face_eps(ev, grid.eps[v + 1]);
                    if (j > 0) d += face_eps(ev, grid.eps[v - sy]);
                    if (j < grid.ny - 1) d += face_eps(ev, grid.eps[v + sy]);
                    if (k > 0) d += face_eps(ev, grid.eps[v - sz]);
                    if (k < grid.nz - 1) d += face_eps(ev, grid.eps[v + sz]);
                    diag[v] = d > 0 ? d : 1.0;
                }
    }

    void apply(const double* x, double* out) const {
        const VoxelGrid& grid = *g;
        const int64_t sy = grid.nx, sz = int64_t(grid.nx) * grid.ny;
        const double* eps = grid.eps.data();
        for (int k = 0; k < grid.nz; ++k)
            for (int j = 0; j < grid.ny; ++j) {
                int64_t row = grid.index(0, j, k);
                for (int i = 0; i < grid.nx; ++i) {
                    int64_t v = row + i;
                    if (owner[v] >= 0) {
                        out[v] = 0;
                        continue;
                    }
                    double ev = eps[v];
                    double acc = diag[v] * x[v];
                    if (i > 0 && owner[v - 1] < 0) acc -= face_eps(ev, eps[v - 1]) * x[v - 1];
                    if (i < grid.nx - 1 && owner[v + 1] < 0)
                        acc -= face_eps(ev, eps[v + 1]) * x[v + 1];
                    if (j > 0 && owner[v - sy] < 0) acc -= face_eps(ev, eps[v - sy]) * x[v - sy];
                    if (j < grid.ny - 1 && owner[v + sy] < 0)
                        acc -= face_eps(ev, eps[v + sy]) * x[v + sy];
                    if (k > 0 && owner[v - sz] < 0) acc -= face_eps(ev, eps[v - sz]) * x[v - sz];
                    if (k < grid.nz - 1 && owner[v + sz] < 0)
                        acc -= face_eps(ev, eps[v + sz]) * x[v + sz];
                    out[v] = acc;
                }
            }
    }
};

}  // namespace

PotentialField solve_potential(const VoxelGrid& grid, const ElectrodeMask& mask, int excited,
                               double volts, const SolverOptions& opt,
                               const PotentialField* warm_start) {
    if (static_cast<int64_t>(mask.owner.size()) != grid.size())
        throw data_error("solve_potential: mask not finalized for this grid");
    if (excited < 0 || excited >= mask.count())
        throw data_error("solve_potential: excited electrode out of range");

    const int64_t n = grid.size();
    Stencil st{&grid, mask.owner.data(), {}};
    st.build();

    // Dirichlet values and RHS: b_v = sum over electrode neighbors eps_f * phi_d
    std::vector<double> bc(n, 0.0);
    for (int64_t v : mask.sets[excited]) bc[v] = volts;
    std::vector<double> b(n, 0.0);
    {
        const int64_t sy = grid.nx, sz = int64_t(grid.nx) * grid.ny;
        for (int k = 0; k < grid.nz; ++k)
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    int64_t v = grid.index(i, j, k);
                    if (mask.owner[v] >= 0) continue;
                    double ev = grid.eps[v];
                    double acc = 0;
                    if (i > 0 && mask.owner[v - 1] >= 0) acc += face_eps(ev, grid.eps[v - 1]) * bc[v - 1];
                    if (i < grid.nx - 1 && mask.owner[v + 1] >= 0)
                        acc += face_eps(ev, grid.eps[v + 1]) * bc[v + 1];
                    if (j > 0 && mask.owner[v - sy] >= 0)
                        acc += face_eps(ev, grid.eps[v - sy]) * bc[v - sy];
                    if (j < grid.ny - 1 && mask.owner[v + sy] >= 0)
                        acc += face_eps(ev, grid.eps[v + sy]) * bc[v + sy];
                    if (k > 0 && mask.owner[v - sz] >= 0)
                        acc += face_eps(ev, grid.eps[v - sz]) * bc[v - sz];
                    if (k < grid.nz - 1 && mask.owner[v + sz] >= 0)
                        acc += face_eps(ev, grid.eps[v + sz]) * bc[v + sz];
                    b[v] = acc;
                }
    }

    std::vector<double> x(n, 0.0);
    if (warm_start && static_cast<int64_t>(warm_start->phi.size()) == n) {
        x = warm_start->phi;
        for (int64_t v = 0; v < n; ++v)
            if (mask.owner[v] >= 0) x[v] = 0;
    }

    std::vector<double> r(n), p(n), z(n), ap(n);
    st.apply(x.data(), r.data());
    double bnorm2 = 0;
    for (int64_t v = 0; v < n; ++v) {
        r[v] = b[v] - r[v];
        bnorm2 += b[v] * b[v];
    }
    if (bnorm2 == 0) throw numeric_error("solve_potential: zero excitation RHS");
    const double stop2 = opt.tol * opt.tol * bnorm2;

    double rz = 0;
    for (int64_t v = 0; v < n; ++v) {
        z[v] = r[v] / st.diag[v];
        p[v] = z[v];
        rz += r[v] * z[v];
    }

    int it = 0;
    double rnorm2 = 0;
    for (int64_t v = 0; v < n; ++v) rnorm2 += r[v] * r[v];
    while (rnorm2 > stop2 && it < opt.max_iter) {
        st.apply(p.data(), ap.data());
        double pap = 0;
        for (int64_t v = 0; v < n; ++v) pap += p[v] * ap[v];
        if (pap <= 0) throw numeric_error("solve_potential: CG breakdown (non-SPD system)");
        double alpha = rz / pap;
        rnorm2 = 0;
        for (int64_t v = 0; v < n; ++v) {
            x[v] += alpha * p[v];
            r[v] -= alpha * ap[v];
            rnorm2 += r[v] * r[v];
        }
        double rz_new = 0;
        for (int64_t v = 0; v < n; ++v) {
            z[v] = r[v] / st.diag[v];
            rz_new += r[v] * z[v];
        }
        double beta = rz_new / rz;
        rz = rz_new;
        for (int64_t v = 0; v < n; ++v) p[v] = z[v] + beta * p[v];
        ++it;
    }
    double rel = std::sqrt(rnorm2 / bnorm2);
    if (rel > opt.tol)
        throw numeric_error("solve_potential: no convergence after " + std::to_string(it) +
                            " iterations, relative residual " + format_double(rel));

    PotentialField out;
    out.phi = std::move(x);
    for (int64_t v = 0; v < n; ++v)
        if (mask.owner[v] >= 0) out.phi[v] = bc[v];
    out.excited = excited;
    out.volts = volts;
    out.iterations = it;
    out.residual = rel;
    return out;
}

double compute_capacitance(const PotentialField& field, const VoxelGrid& grid,
                           const ElectrodeMask& mask, int sense) {
    if (sense < 0 || sense >= mask.count())
        throw data_error("compute_capacitance: sense electrode out of range");
    if (sense == field.excited)
        throw data_error("compute_capacitance: sense equals excited electrode");

    // One-voxel dilation of the sense set; flux through the outer faces.
    const int64_t sy = grid.nx, sz = int64_t(grid.nx) * grid.ny;
    std::vector<int64_t> region = mask.sets[sense];
    {
        std::vector<int64_t> shell;
        for (int64_t v : region) {
            int i = static_cast<int>(v % grid.nx);
            int j = static_cast<int>((v / grid.nx) % grid.ny);
            int k = static_cast<int>(v / sz);
            const int64_t nb[6] = {v - 1, v + 1, v - sy, v + sy, v - sz, v + sz};
            const bool ok[6] = {i > 0, i < grid.nx - 1, j > 0, j < grid.ny - 1,
                                k > 0, k < grid.nz - 1};
            for (int d = 0; d < 6; ++d)
                if (ok[d] && mask.owner[nb[d]] < 0) shell.push_back(nb[d]);
        }
        region.insert(region.end(), shell.begin(), shell.end());
        std::sort(region.begin(), region.end());
        region.erase(std::unique(region.begin(), region.end()), region.end());
    }
    auto in_region = [&](int64_t v) {
        auto it = std::lower_bound(region.begin(), region.end(), v);
        return it != region.end() && *it == v;
    };

    double q = 0;  // sum of eps_f * (phi_out - phi_in), times h gives V*mm
    for (int64_t v : region) {
        int i = static_cast<int>(v % grid.nx);
        int j = static_cast<int>((v / grid.nx) % grid.ny);
        int k = static_cast<int>(v / sz);
        const int64_t nb[6] = {v - 1, v + 1, v - sy, v + sy, v - sz, v + sz};
        const bool ok[6] = {i > 0, i < grid.nx - 1, j > 0, j < grid.ny - 1, k > 0, k < grid.nz - 1};
        for (int d = 0; d < 6; ++d) {
            if (!ok[d] || in_region(nb[d])) continue;
            q += face_eps(grid.eps[v], grid.eps[nb[d]]) * (field.phi[nb[d]] - field.phi[v]);
        }
    }
    return kEps0 * 1e-3 * std::abs(q * grid.h) / field.volts;
}

sensing::CapacitanceFrame capacitance_frame(const VoxelGrid& grid, const ElectrodeMask& mask,
                                            const SolverOptions& opt, WarmCache* warm_cache,
                                            std::vector<int>* iteration_log) {
    if (mask.count() != sensing::kElectrodes)
        throw data_error("capacitance_frame: expected 8 electrodes");
    if (warm_cache && warm_cache->by_excitation.size() != sensing::kElectrodes - 1)
        warm_cache->by_excitation.resize(sensing::kElectrodes - 1);

    sensing::CapacitanceFrame out;
    out.kind = sensing::FrameKind::Raw;
    for (int e = 0; e < sensing::kElectrodes - 1; ++e) {
        const PotentialField* warm = nullptr;
        if (warm_cache && !warm_cache->by_excitation[e].phi.empty())
            warm = &warm_cache->by_excitation[e];
        PotentialField field;
        try {
            field = solve_potential(grid, mask, e, 1.0, opt, warm);
        } catch (const Error& err) {
            throw numeric_error("capacitance_frame: excitation " + std::to_string(e + 1) + ": " +
                                err.what());
        }
        if (iteration_log) iteration_log->push_back(field.iterations);
        for (int s = e + 1; s < sensing::kElectrodes; ++s) {
            double c_farad = compute_capacitance(field, grid, mask, s);
            out.c[sensing::pair_index(e + 1, s + 1)] = c_farad * 1e15;  // fF
        }
        if (warm_cache) warm_cache->by_excitation[e] = std::move(field);
    }
    return out;
}

}  // namespace eskin::fields

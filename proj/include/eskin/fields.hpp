#pragma once
// Electrostatic forward model: pairwise capacitances from a permittivity
// field and electrode geometry. Two interchangeable backends:
//   - finite-difference field solver (high fidelity, validation)
//   - calibrated lumped segment model (fast, default for dataset generation)

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "eskin/common.hpp"
#include "eskin/config.hpp"
#include "eskin/geometry.hpp"
#include "eskin/sensing.hpp"

namespace eskin::fields {

inline constexpr double kEps0 = 8.854e-12;  // F/m

struct VoxelGrid {
    int nx = 0, ny = 0, nz = 0;
    double h = 1.0;  // mm per voxel, cubic
    Vec3 origin;     // low corner; voxel centers at origin + (i+0.5)h
    std::vector<double> eps;

    int64_t size() const { return int64_t(nx) * ny * nz; }
    int64_t index(int i, int j, int k) const { return (int64_t(k) * ny + j) * nx + i; }
    Vec3 center(int i, int j, int k) const {
        return {origin.x + (i + 0.5) * h, origin.y + (j + 0.5) * h, origin.z + (k + 0.5) * h};
    }
    void validate() const;  // dims >= 3, eps >= 1, size match
};

struct ElectrodeMask {
    std::vector<std::vector<int64_t>> sets;  // voxel indices per electrode
    std::vector<Vec3> centroids;             // mm
    std::vector<int16_t> owner;              // per voxel: -1 free, else electrode id

    int count() const { return static_cast<int>(sets.size()); }
    // Rebuilds `owner` and centroids from `sets`; checks sets are nonempty,
    // disjoint, in range, and face-connected.
    void finalize(const VoxelGrid& grid);
};

struct PotentialField {
    std::vector<double> phi;  // volts, full grid
    int excited = -1;
    double volts = 1.0;
    int iterations = 0;
    double residual = 0;
};

struct SolverOptions {
    double tol = 1e-8;  // relative residual
    int max_iter = 20000;
};

// Solves div(eps grad phi) = 0 with Dirichlet electrodes (V on the excited
// one, 0 elsewhere) and zero-flux outer boundary; 7-point stencil with
// harmonic-mean face permittivity, Jacobi-preconditioned CG.
PotentialField solve_potential(const VoxelGrid& grid, const ElectrodeMask& mask, int excited,
                               double volts, const SolverOptions& opt,
                               const PotentialField* warm_start = nullptr);

// |Q|/V in farads: flux of eps grad phi through the voxel faces bounding the
// sense electrode's one-voxel dilation.
double compute_capacitance(const PotentialField& field, const VoxelGrid& grid,
                           const ElectrodeMask& mask, int sense);

struct WarmCache {
    std::vector<PotentialField> by_excitation;
};

// Excites electrodes 1..7 in turn, senses all higher-numbered ones; 28 raw
// values in canonical pair order (fF).
sensing::CapacitanceFrame capacitance_frame(const VoxelGrid& grid, const ElectrodeMask& mask,
                                            const SolverOptions& opt,
                                            WarmCache* warm_cache = nullptr,
                                            std::vector<int>* iteration_log = nullptr);

// Voxelization of a deformed manipulator state: permittivity sampled at
// voxel centers, electrodes rasterized as 1-voxel-thick runs along the
// displaced centerlines. Grid extents depend only on the config (so a cache
// stays valid across frames of a group).
struct Raster {
    VoxelGrid grid;
    ElectrodeMask mask;
};
Raster rasterize(const geometry::DeformationField& state, const Config& cfg);

class FdBackend {
  public:
    explicit FdBackend(const Config& cfg) : cfg_(cfg) {}
    sensing::CapacitanceFrame raw_frame(const geometry::DeformationField& state);
    void reset_cache() { cache_.by_excitation.clear(); }

  private:
    Config cfg_;
    WarmCache cache_;
};

// Quasi-analytic surrogate: per electrode pair, sum over discretized wire
// segments of (effective permittivity along the gap) * (segment length) /
// (gap distance), scaled per pair to match the FD backend at the rest state.
class LumpedBackend {
  public:
    LumpedBackend(const geometry::ManipulatorGeometry& geom, const Config& cfg);

    // Fits the per-pair mapping C = C0 * (u/u0)^gamma against the FD
    // backend at the rest state and at full inflation, so both anchor
    // frames reproduce FD exactly. Deterministic; call once before use.
    void calibrate_to_fd();
    void set_scale(const std::array<double, sensing::kPairs>& scale);
    bool calibrated() const { return calibrated_; }

    sensing::CapacitanceFrame raw_frame(const geometry::DeformationField& state) const;

    // Pre-scale pair sum, exposed for calibration and tests. The touch
    // permittivity boost can be disabled to isolate geometric effects.
    double unit_pair_value(const geometry::DeformationField& state, int flat,
                           bool with_touch_boost = true) const;

  private:
    double map_pair(int flat, double unit) const;

    const geometry::ManipulatorGeometry* geom_;
    Config cfg_;
    std::array<double, sensing::kPairs> c0_;     // fF at the rest anchor
    std::array<double, sensing::kPairs> u0_;     // unit value at the rest anchor
    std::array<double, sensing::kPairs> gamma_;  // per-pair trend exponent
    bool calibrated_ = false;
};

}  // namespace eskin::fields

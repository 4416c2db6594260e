#pragma once
// Measurement chain: canonical electrode-pair indexing, relative-change
// calibration, and readout electronics noise (SNR + quantization).

#include <array>
#include <cstdint>
#include <vector>

#include "eskin/common.hpp"

namespace eskin::sensing {

inline constexpr int kElectrodes = 8;
inline constexpr int kPairs = 28;

enum class FrameKind { Raw, Calibrated };

// One measurement frame: 28 values in canonical pair order
// (1,2),(1,3),...,(1,8),(2,3),...,(7,8). Raw values are capacitances in fF;
// calibrated values are dimensionless relative changes.
struct CapacitanceFrame {
    std::array<double, kPairs> c{};
    double timestamp = 0;
    FrameKind kind = FrameKind::Raw;
};

// Lexicographic flat index of pair (i, j), electrodes 1-based, i < j.
int pair_index(int i, int j);
std::pair<int, int> pair_electrodes(int flat);

// Both electrodes on the same e-skin module (1..4 front, 5..8 back).
bool pair_same_face(int flat);

struct NoiseModel {
    double quantization_step_ff = 1.0;
    double snr_db = 60.0;
    uint64_t seed = 0;
};

// Eq-style relative change (c_t - c_0) / c_0, elementwise.
CapacitanceFrame calibrate(const CapacitanceFrame& c_t, const CapacitanceFrame& c_0);

// Gaussian noise with per-channel std = value / 10^(snr_db/20), then
// quantization to the nearest step, clamped at zero. Deterministic in seed.
CapacitanceFrame apply_noise(const CapacitanceFrame& frame, const NoiseModel& model, Rng& rng);

// Analytic std of the additive measurement error on a raw channel of the
// given magnitude (Gaussian plus uniform quantization error, independent).
double noise_std_ff(double raw_ff, const NoiseModel& model);

}  // namespace eskin::sensing

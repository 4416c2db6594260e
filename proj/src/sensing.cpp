#include "eskin/sensing.hpp"

#include <cmath>

namespace eskin::sensing {

int pair_index(int i, int j) {
    if (i < 1 || j <= i || j > kElectrodes)
        throw data_error("pair_index: require 1 <= i < j <= 8");
    // pairs with first electrode < i come first: (i-1) blocks of decreasing size
    return (i - 1) * (2 * kElectrodes - i) / 2 + (j - i - 1);
}

std::pair<int, int> pair_electrodes(int flat) {
    if (flat < 0 || flat >= kPairs) throw data_error("pair_electrodes: index out of range");
    for (int i = 1; i < kElectrodes; ++i) {
        int block = kElectrodes - i;
        if (flat < block) return {i, i + 1 + flat};
        flat -= block;
    }
    throw data_error("pair_electrodes: unreachable");
}

bool pair_same_face(int flat) {
    auto [i, j] = pair_electrodes(flat);
    return (i <= 4) == (j <= 4);
}

CapacitanceFrame calibrate(const CapacitanceFrame& c_t, const CapacitanceFrame& c_0) {
    if (c_t.kind != FrameKind::Raw || c_0.kind != FrameKind::Raw)
        throw data_error("calibrate: both frames must be raw");
    CapacitanceFrame out;
    out.timestamp = c_t.timestamp;
    out.kind = FrameKind::Calibrated;
    for (int k = 0; k < kPairs; ++k) {
        if (c_0.c[k] <= 0) throw data_error("calibrate: non-positive reference entry");
        out.c[k] = (c_t.c[k] - c_0.c[k]) / c_0.c[k];
    }
    return out;
}

CapacitanceFrame apply_noise(const CapacitanceFrame& frame, const NoiseModel& model, Rng& rng) {
    if (frame.kind != FrameKind::Raw) throw data_error("apply_noise: frame must be raw");
    if (model.quantization_step_ff <= 0 || model.snr_db <= 0)
        throw data_error("apply_noise: invalid noise model");
    double amp = std::pow(10.0, model.snr_db / 20.0);
    CapacitanceFrame out = frame;
    for (int k = 0; k < kPairs; ++k) {
        double sigma = frame.c[k] / amp;
        double v = frame.c[k] + sigma * rng.normal();
        double q = model.quantization_step_ff;
        v = std::round(v / q) * q;
        out.c[k] = std::max(0.0, v);
    }
    return out;
}

double noise_std_ff(double raw_ff, const NoiseModel& model) {
    double gauss = raw_ff / std::pow(10.0, model.snr_db / 20.0);
    double quant = model.quantization_step_ff / std::sqrt(12.0);
    return std::sqrt(gauss * gauss + quant * quant);
}

}  // namespace eskin::sensing

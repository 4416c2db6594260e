#pragma once
// Run configuration: every tunable constant in one struct, parsed from a
// `key = value` text file with embedded defaults. Unknown keys are errors so
// typos do not silently fall back to defaults.

#include <map>
#include <string>

namespace eskin {

struct Config {
    // --- geometry (mm unless noted) ---
    double body_width = 50.0;
    double body_length = 120.0;
    double body_thickness = 20.0;
    double skin_width = 40.0;
    double skin_length = 110.0;
    double skin_offset_x = 5.0;   // skin rectangle origin in body frame
    double skin_offset_y = 5.0;
    double chamber_width = 40.0;
    double chamber_length = 30.0;
    double chamber_gap = 7.5;     // body edge to first chamber, and between chambers
    double inlet_width = 1.5;
    double wall_thickness = 2.0;  // silicone shell between cavity and outer face
    double wire_width = 1.0;
    double wire_base_y = 7.5;     // wire start offset from its entry edge (interface pad)
    // Length + placement per wire, lateral order. Entries are "95b" (runs
    // from the low-y interface), "45t" (from the high-y interface) or
    // "20@60" (starts at skin y = 60). Lengths must be {20,45,70,95} in
    // some order.
    std::string wire_layout = "95b,20@60,45t,70b";
    // Lateral centerline offsets within the skin, mm (one per wire).
    std::string wire_x_offsets = "14,21,28,35";
    double interface_size = 5.0;
    double marker_edge_x = 50.0;  // markers sit on the x = body_width side wall
    double marker_y0 = 10.0;
    double marker_pitch = 25.0;   // five markers: y0, y0+pitch, ...

    // --- deformation ---
    double bump_taper = 4.0;          // lateral smoothstep band of the inflation bump
    double contact_stiffness = 1.0;   // indentation depth per force, mm/N
    double contact_radius = 8.0;      // mm
    double bend_per_newton = 0.01;    // rigid distal rotation, rad/N
    double bend_band = 10.0;          // smoothing band around the hinge, mm
    double max_inflation_ml = 20.0;

    // --- materials ---
    double eps_silicone = 3.0;
    double eps_finger = 35.0;
    double finger_force_sat = 3.0;    // N at which finger coupling saturates
    double touch_gain = 1.0;          // lumped-model touch coupling strength
    double touch_steal = 0.5;         // soft-field flux-diversion exponent

    // --- field solver ---
    double grid_spacing = 2.0;        // mm per voxel
    double grid_margin = 6.0;         // air margin around the deformed body, mm
    double solver_tol = 1e-8;         // relative residual
    int solver_max_iter = 20000;
    double excitation_volts = 1.0;

    // --- lumped backend ---
    double segment_length = 2.0;      // wire discretization step, mm
    double eps_probe_offset = 0.75;   // face-normal offset for gap permittivity samples
    double distance_exponent = 1.6;   // gap-distance decay power of the segment coupling
    int gap_samples = 5;              // permittivity samples along each gap line

    // --- sensing ---
    double snr_db = 60.0;
    double quantization_ff = 1.0;     // fF
    uint64_t noise_seed = 1234;

    // --- experiment protocol ---
    double group_duration_s = 30.0;
    double fps = 30.0;
    double inflation_ramp_s = 10.0;   // stage-1 linear ramp
    double peak_force_n = 5.0;
    double force_attack_s = 0.05;     // force profile rise time from zero
    double force_floor = 0.15;        // fraction of peak the rectifier never drops below
    double subregion_margin = 5.0;    // contact centers keep this far from cell edges
    int misalign_max_frames = 3;      // capacitance/marker stream offset, 0..N
    int keyframe_stride_lumped = 1;
    int keyframe_stride_fd = 10;      // FD frames between exact solves (linear interp)

    // --- training ---
    int touch_epochs = 100;
    int touch_batch = 256;
    int track_epochs = 150;
    int track_batch = 255;
    double lr_initial = 0.001;
    double lr_decay = 1.2;
    int lr_decay_epochs = 15;
    double dropout = 0.1;
    int mlp_hidden = 128;
    int c2dt_width = 64;
    int c2dt_heads = 4;
    int c2dt_enc_layers = 2;
    int c2dt_dec_layers = 2;
    int c2dt_ff = 128;
    int c2dt_window = 10;
    int train_window_stride = 128;    // tracking windows per epoch = frames/stride
    int val_window_stride = 64;
    double pos_scale = 0.02;          // mm -> network units for P/Q and markers
    double cap_scale = 2.0;           // calibrated capacitance -> network units
    bool translate_augment = false;
    double augment_range_mm = 20.0;

    Config() = default;

    // Parse `key = value` lines ('#' comments); throws config_error on
    // unknown keys or malformed values.
    static Config from_file(const std::string& path);
    static Config from_string(const std::string& text);

    void set(const std::string& key, const std::string& value);

    // Full snapshot in the same key = value format (deterministic order).
    std::string dump() const;
};

}  // namespace eskin

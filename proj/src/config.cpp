#include "eskin/config.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "eskin/common.hpp"

namespace eskin {

std::string format_hex(uint64_t v) {
    char buf[17];
    snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

std::string format_double(double v) {
    char buf[32];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

struct Field {
    const char* key;
    std::function<void(Config&, const std::string&)> set;
    std::function<std::string(const Config&)> get;
};

double parse_num(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw config_error("config: bad numeric value for '" + key + "': " + v);
    }
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw config_error("config: bad boolean value for '" + key + "': " + v);
}

#define F_DOUBLE(name)                                                              \
    Field{#name, [](Config& c, const std::string& v) { c.name = parse_num(#name, v); }, \
          [](const Config& c) { return format_double(c.name); }}
#define F_INT(name)                                                                   \
    Field{#name,                                                                      \
          [](Config& c, const std::string& v) {                                       \
              double d = parse_num(#name, v);                                         \
              c.name = static_cast<int>(d);                                           \
              if (c.name != d) throw config_error("config: '" #name "' must be an integer"); \
          },                                                                          \
          [](const Config& c) { return std::to_string(c.name); }}
#define F_U64(name)                                                                 \
    Field{#name,                                                                    \
          [](Config& c, const std::string& v) {                                     \
              c.name = static_cast<uint64_t>(parse_num(#name, v));                  \
          },                                                                        \
          [](const Config& c) { return std::to_string(c.name); }}
#define F_BOOL(name)                                                                 \
    Field{#name, [](Config& c, const std::string& v) { c.name = parse_bool(#name, v); }, \
          [](const Config& c) { return c.name ? std::string("true") : std::string("false"); }}
#define F_STRING(name)                                                          \
    Field{#name, [](Config& c, const std::string& v) { c.name = v; },           \
          [](const Config& c) { return c.name; }}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        F_DOUBLE(body_width), F_DOUBLE(body_length), F_DOUBLE(body_thickness),
        F_DOUBLE(skin_width), F_DOUBLE(skin_length), F_DOUBLE(skin_offset_x),
        F_DOUBLE(skin_offset_y), F_DOUBLE(chamber_width), F_DOUBLE(chamber_length),
        F_DOUBLE(chamber_gap), F_DOUBLE(inlet_width), F_DOUBLE(wall_thickness),
        F_DOUBLE(wire_width), F_STRING(wire_x_offsets),
        F_DOUBLE(wire_base_y), F_STRING(wire_layout), F_DOUBLE(interface_size),
        F_DOUBLE(marker_edge_x), F_DOUBLE(marker_y0), F_DOUBLE(marker_pitch),
        F_DOUBLE(bump_taper), F_DOUBLE(contact_stiffness), F_DOUBLE(contact_radius),
        F_DOUBLE(bend_per_newton), F_DOUBLE(bend_band), F_DOUBLE(max_inflation_ml),
        F_DOUBLE(eps_silicone), F_DOUBLE(eps_finger), F_DOUBLE(finger_force_sat),
        F_DOUBLE(touch_gain), F_DOUBLE(touch_steal),
        F_DOUBLE(grid_spacing), F_DOUBLE(grid_margin), F_DOUBLE(solver_tol),
        F_INT(solver_max_iter), F_DOUBLE(excitation_volts),
        F_DOUBLE(segment_length), F_DOUBLE(eps_probe_offset), F_DOUBLE(distance_exponent),
        F_INT(gap_samples),
        F_DOUBLE(snr_db), F_DOUBLE(quantization_ff), F_U64(noise_seed),
        F_DOUBLE(group_duration_s), F_DOUBLE(fps), F_DOUBLE(inflation_ramp_s),
        F_DOUBLE(peak_force_n), F_DOUBLE(force_attack_s), F_DOUBLE(force_floor),
        F_DOUBLE(subregion_margin), F_INT(misalign_max_frames),
        F_INT(keyframe_stride_lumped), F_INT(keyframe_stride_fd),
        F_INT(touch_epochs), F_INT(touch_batch), F_INT(track_epochs), F_INT(track_batch),
        F_DOUBLE(lr_initial), F_DOUBLE(lr_decay), F_INT(lr_decay_epochs),
        F_DOUBLE(dropout), F_INT(mlp_hidden),
        F_INT(c2dt_width), F_INT(c2dt_heads), F_INT(c2dt_enc_layers),
        F_INT(c2dt_dec_layers), F_INT(c2dt_ff), F_INT(c2dt_window),
        F_INT(train_window_stride), F_INT(val_window_stride),
        F_DOUBLE(pos_scale), F_DOUBLE(cap_scale),
        F_BOOL(translate_augment), F_DOUBLE(augment_range_mm),
    };
    return table;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

void Config::set(const std::string& key, const std::string& value) {
    for (const Field& f : fields()) {
        if (key == f.key) {
            f.set(*this, value);
            return;
        }
    }
    throw config_error("config: unknown key '" + key + "'");
}

Config Config::from_string(const std::string& text) {
    Config c;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) + " is not 'key = value'");
        c.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return c;
}

Config Config::from_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw config_error("config: cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_string(ss.str());
}

std::string Config::dump() const {
    std::string out;
    for (const Field& f : fields()) {
        out += f.key;
        out += " = ";
        out += f.get(*this);
        out += "\n";
    }
    return out;
}

}  // namespace eskin

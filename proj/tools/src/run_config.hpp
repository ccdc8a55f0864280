#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsdsce/evaluation.hpp"

namespace gsdsce::cli {

/// Values read from a flat `key = value` file. Unset keys keep the preset's
/// defaults. `#` starts a comment.
///
/// Keys: n_subcarriers, delta_f_hz, pilot_spacing, modulation_order,
/// path_count, rate_inv_s, tau_max_s (a number or `inf`), trials, seed,
/// methods (comma separated: gsd, omp, cubic, perfect).
struct ConfigFile {
    std::optional<std::size_t> n_subcarriers;
    std::optional<double> delta_f_hz;
    std::optional<std::size_t> pilot_spacing;
    std::optional<std::size_t> modulation_order;
    std::optional<std::size_t> path_count;
    std::optional<double> rate_inv_s;
    std::optional<double> tau_max_s;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::vector<eval::Method>> methods;
};

/// Throws ErrorKind::parse naming the line on unknown keys or bad values.
ConfigFile parse_config(std::string_view text);
ConfigFile load_config(const std::string& path);

/// Later fields win.
ConfigFile merge(const ConfigFile& base, const ConfigFile& over);

void apply(const ConfigFile& file, eval::ExperimentConfig& ec);

/// One point of a sweep; every point of a preset shares the base seed so the
/// channel draws are matched across the sweep.
struct SweepPoint {
    std::string series;
    std::string sweep_var;
    double sweep_value = 0.0;
    eval::ExperimentConfig config;
};

enum class Preset { fig1, fig2, fig3, custom };

std::optional<Preset> preset_from_string(std::string_view name) noexcept;
const char* to_string(Preset p) noexcept;

/// Expands a preset. `overrides` apply to every point first; the sweep
/// variable of the preset then takes its per-point value.
std::vector<SweepPoint> expand_preset(Preset preset, const ConfigFile& overrides);

}  // namespace gsdsce::cli

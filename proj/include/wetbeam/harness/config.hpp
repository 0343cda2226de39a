// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "wetbeam/channel.hpp"
#include "wetbeam/geometry.hpp"
#include "wetbeam/init.hpp"
#include "wetbeam/power.hpp"
#include "wetbeam/sca.hpp"
#include "wetbeam/solution.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wetbeam::harness {

enum class ExperimentKind {
    Sweep,       ///< total power per architecture over a parameter axis
    Convergence, ///< one SCA run per chain assignment
    NearField,   ///< normalized power maps for a single-chain beacon
};

enum class SweepAxis { None, Chains, Elements, Ways, FeederDistance };

enum class FocusMode { Sca, Conjugate };

std::string to_string(ExperimentKind kind);
std::string to_string(SweepAxis axis);
std::string to_string(FocusMode mode);

/// One experiment. Key names in config files follow the parameter symbols
/// (P_bb, P_max, eta_max, gamma_s, ...); see keys() for the full list.
struct ExperimentConfig {
    std::string id = "custom";
    ExperimentKind kind = ExperimentKind::Sweep;

    double P_bb = 0.2;
    double P_tc = 0.1;
    double P_ctrl = 1.0;
    double P_cell = 1e-3;
    double P_th = 1e-3;
    double P_max = 300.0;
    double mu = 10.0;
    double kappa = 2.0;
    std::optional<double> delta; ///< ITS spacing, lambda / 2 when unset
    double eta_max = 0.25;
    double rho_its = 0.45;
    int K = 4;
    int M = 100;
    int N = 4;
    double f_c = 5e9;
    double gamma_s = 0.5;
    double gamma_c = 0.5;
    double gamma_p = 3.5;
    std::optional<double> r_a; ///< lambda / (2 sin(pi / N)) when unset
    std::optional<double> d_f; ///< (lambda / 2) sqrt(M / pi) when unset
    int ell = 2;
    double g = 100.0;

    double d_x = 3.0;
    double d_y = 3.0;
    double d_z = 5.0;

    std::vector<Architecture> architectures{Architecture::Its, Architecture::FullyDigital, Architecture::HybridFull,
                                            Architecture::HybridPartial};
    SweepAxis sweep = SweepAxis::None;
    std::vector<double> sweep_values;
    int realizations = 100;
    std::uint64_t seed = 1;
    std::string output_dir = "results";
    int workers = 1;

    std::string cluster_rule = "strongest";
    long long permutation_cap = 100000;
    int max_iterations = 50;
    double tolerance = 1e-4;

    FocusMode focus = FocusMode::Sca;
    double device_distance = 1.5; ///< near-field map: on-axis device depth
    double map_extent = 3.0;      ///< side of the square device-plane map (m)
    int map_points = 121;         ///< grid points per side

    /// Throws ConfigError on the first violated invariant.
    void validate() const;

    /// Values taken by the sweep axis; {0} when there is no axis.
    std::vector<double> sweep_points() const;
    /// Copy with the sweep axis set to `value`.
    ExperimentConfig at_sweep_point(double value) const;

    double wavelength() const;
    GeometryParams geometry() const;
    RadiationParams radiation() const;
    PowerModel power_model() const;
    ScaSettings sca_settings() const;
    InitSettings init_settings() const;
};

/// Every accepted configuration key, in snapshot order.
const std::vector<std::string>& keys();

/// Preset by name (fig4 ... fig8). Throws ConfigError for unknown names.
ExperimentConfig preset(const std::string& name);

/// Applies a JSON object of key/value pairs. Unknown keys and type mismatches
/// raise ConfigError. Does not validate.
void apply_json(ExperimentConfig& config, const std::string& json_text, const std::string& origin);

/// One `key=value` override. The value is read as JSON when possible, else as a bare string.
void apply_override(ExperimentConfig& config, const std::string& assignment);

/// base -> file (when given) -> overrides, then validate.
ExperimentConfig load_config(const std::optional<std::string>& path, const std::vector<std::string>& overrides,
                             const ExperimentConfig& base = {});

/// Reduces M (including M sweep points) and realization counts by `factor` in (0, 1].
ExperimentConfig scaled(const ExperimentConfig& config, double factor);

/// Pretty JSON snapshot with every key.
std::string to_json(const ExperimentConfig& config);

} // namespace wetbeam::harness

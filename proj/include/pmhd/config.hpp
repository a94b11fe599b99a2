#pragma once

#include <string>
#include <vector>

namespace pmhd {

/// Run configuration: physical/asymptotic parameters and numerical controls.
/// Parsed from `key = value` text, one per line, `#` comments.
struct Config {
    double epsilon = 1e-3;
    double delta = 0.05;
    double sigma = 0.05;
    int n = 2;
    double gamma = 0.0;
    double kappa = 0.05;
    double sigma0 = 0.2;      // Q-norm weight, 0 < sigma0 < 1/4
    double sigma1 = -1.0;     // P-norm weight override; schedule value when < 0

    double x_max = 50.0;
    double y_max = 12.0;      // DNS wall-normal extent
    double eta_max = 0.0;     // 0: auto z_cov*sqrt(x_max)
    double z_max = 12.0;      // self-similar domain truncation
    std::size_t nx = 512;     // DNS grid
    std::size_t ny = 192;
    std::size_t n_eta = 288;  // von Mises march nodes
    std::size_t ny_layer = 320;  // tall layer grid nodes
    double stretch = 3.0;     // DNS/leading wall-normal clustering
    double stretch_layer = 6.0;

    double tol_picard = 1e-12;
    double tol_newton = 1e-9;
    double dns_tol = 1e-8;
    double tail_tol = 1e-8;
    int max_iter = 200;

    std::vector<double> sweep = {4e-3, 2e-3, 1e-3, 5e-4};
    std::string output_dir = "out";
    unsigned long seed = 12345;

    bool strict = true;
    std::vector<std::string> warnings;  // relaxed-mode downgrades, recorded in the manifest

    double epsilon_star() const { return sigma > 0.0 ? std::min(delta, sigma) : delta; }
    double sigma_i(int i) const;

    /// Validate the physical-regime invariants; strict mode turns violations
    /// into errors, relaxed mode records them as warnings.
    void validate();
};

Config load_config(const std::string& path, bool strict = true);
Config parse_config_text(const std::string& text, bool strict = true);

std::string config_to_text(const Config& c);

}  // namespace pmhd

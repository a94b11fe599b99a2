#include "pmhd/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pmhd/errors.hpp"
#include "pmhd/layers.hpp"

namespace pmhd {

double Config::sigma_i(int i) const {
    if (i == 1 && sigma1 > 0.0) return sigma1;
    return sigma_schedule(i, n);
}

namespace {

std::vector<double> parse_list(const std::string& v, int line_no) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (...) {
            throw ConfigError("config: bad number '" + tok + "'", line_no);
        }
    }
    if (out.empty()) throw ConfigError("config: empty list", line_no);
    return out;
}

}  // namespace

void Config::validate() {
    auto fail = [&](const std::string& msg) {
        if (strict) throw ConfigError("strict mode: " + msg);
        warnings.push_back(msg);
    };
    if (!(delta > 0.0 && delta < 0.5))
        fail("delta=" + std::to_string(delta) + " violates 0 < delta << 1");
    if (!(sigma >= 0.0 && sigma < 0.5))
        fail("sigma=" + std::to_string(sigma) + " violates 0 <= sigma << 1");
    if (n < 2) throw ConfigError("n=" + std::to_string(n) + " violates n >= 2");
    if (!(gamma >= 0.0 && gamma < 0.25))
        throw ConfigError("gamma=" + std::to_string(gamma) + " violates 0 <= gamma < 1/4");
    if (!(kappa > 0.0 && gamma + kappa < 0.25))
        throw ConfigError("gamma+kappa=" + std::to_string(gamma + kappa) +
                          " violates gamma+kappa < 1/4");
    if (!(sigma0 > 0.0 && sigma0 < 0.25))
        fail("sigma0=" + std::to_string(sigma0) + " violates 0 < sigma0 < 1/4");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (epsilon > epsilon_star())
        fail("epsilon=" + std::to_string(epsilon) + " violates epsilon <= epsilon_* = " +
             std::to_string(epsilon_star()) + " (min(delta, sigma) for sigma > 0, delta otherwise)");
    for (double e : sweep)
        if (e > epsilon_star())
            fail("sweep epsilon=" + std::to_string(e) + " violates epsilon <= epsilon_*");
}

Config parse_config_text(const std::string& text, bool strict) {
    Config c;
    c.strict = strict;
    std::stringstream ss(text);
    std::string line;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        if (eq == std::string::npos)
            throw ConfigError("config: expected key = value", line_no);
        auto trim = [](std::string s) {
            auto a = s.find_first_not_of(" \t\r");
            auto b = s.find_last_not_of(" \t\r");
            return (a == std::string::npos) ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config: empty key or value", line_no);
        auto num = [&]() {
            try {
                return std::stod(val);
            } catch (...) {
                throw ConfigError("config: bad number '" + val + "' for " + key, line_no);
            }
        };
        if (key == "epsilon") c.epsilon = num();
        else if (key == "delta") c.delta = num();
        else if (key == "sigma") c.sigma = num();
        else if (key == "n") c.n = int(num());
        else if (key == "gamma") c.gamma = num();
        else if (key == "kappa") c.kappa = num();
        else if (key == "sigma0") c.sigma0 = num();
        else if (key == "sigma1") c.sigma1 = num();
        else if (key == "x_max") c.x_max = num();
        else if (key == "y_max") c.y_max = num();
        else if (key == "eta_max") c.eta_max = num();
        else if (key == "z_max") c.z_max = num();
        else if (key == "nx") c.nx = std::size_t(num());
        else if (key == "ny") c.ny = std::size_t(num());
        else if (key == "n_eta") c.n_eta = std::size_t(num());
        else if (key == "ny_layer") c.ny_layer = std::size_t(num());
        else if (key == "stretch") c.stretch = num();
        else if (key == "stretch_layer") c.stretch_layer = num();
        else if (key == "tol_picard") c.tol_picard = num();
        else if (key == "tol_newton") c.tol_newton = num();
        else if (key == "dns_tol") c.dns_tol = num();
        else if (key == "tail_tol") c.tail_tol = num();
        else if (key == "max_iter") c.max_iter = int(num());
        else if (key == "sweep") c.sweep = parse_list(val, line_no);
        else if (key == "output_dir") c.output_dir = val;
        else if (key == "seed") c.seed = static_cast<unsigned long>(num());
        else
            throw ConfigError("config: unknown key '" + key + "'", line_no);
    }
    c.validate();
    return c;
}

Config load_config(const std::string& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw NotFoundError("config file not found: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), strict);
}

std::string config_to_text(const Config& c) {
    std::ostringstream os;
    os.precision(17);
    os << "epsilon = " << c.epsilon << "\ndelta = " << c.delta << "\nsigma = " << c.sigma
       << "\nn = " << c.n << "\ngamma = " << c.gamma << "\nkappa = " << c.kappa
       << "\nsigma0 = " << c.sigma0 << "\nsigma1 = " << c.sigma1 << "\nx_max = " << c.x_max
       << "\ny_max = " << c.y_max << "\neta_max = " << c.eta_max << "\nz_max = " << c.z_max
       << "\nnx = " << c.nx << "\nny = " << c.ny << "\nn_eta = " << c.n_eta
       << "\nny_layer = " << c.ny_layer << "\nstretch = " << c.stretch
       << "\nstretch_layer = " << c.stretch_layer << "\ntol_picard = " << c.tol_picard
       << "\ntol_newton = " << c.tol_newton << "\ndns_tol = " << c.dns_tol
       << "\ntail_tol = " << c.tail_tol << "\nmax_iter = " << c.max_iter << "\nsweep = ";
    for (std::size_t i = 0; i < c.sweep.size(); ++i)
        os << (i ? "," : "") << c.sweep[i];
    os << "\noutput_dir = " << c.output_dir << "\nseed = " << c.seed << "\n";
    return os.str();
}

}  // namespace pmhd

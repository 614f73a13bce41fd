#include "nuclat/lattice.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nuclat {

void LatticeConfig::validate() const {
    if (L < 2 || L > 8)
        throw std::invalid_argument("LatticeConfig: L must be in [2, 8], got " + std::to_string(L));
    if (!(a_fm > 0.0))
        throw std::invalid_argument("LatticeConfig: a_fm must be positive");
    if (!(mass_mev > 0.0))
        throw std::invalid_argument("LatticeConfig: mass_mev must be positive");
    if (!(hbar_c_mev_fm > 0.0))
        throw std::invalid_argument("LatticeConfig: hbar_c_mev_fm must be positive");
}

LatticeConfig parse_config(std::istream& in) {
    LatticeConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string key, eq, value;
        std::istringstream ls(line);
        if (!(ls >> key)) continue; // blank
        if (!(ls >> eq >> value) || eq != "=")
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        try {
            if (key == "L")
                cfg.L = std::stoi(value);
            else if (key == "a_fm")
                cfg.a_fm = std::stod(value);
            else if (key == "mass_mev")
                cfg.mass_mev = std::stod(value);
            else if (key == "hbar_c_mev_fm")
                cfg.hbar_c_mev_fm = std::stod(value);
            else if (key == "c2_mev")
                cfg.c2_mev = std::stod(value);
            else if (key == "c3_mev")
                cfg.c3_mev = std::stod(value);
            else
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": bad numeric value '" + value + "'");
        }
    }
    return cfg;
}

LatticeConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    LatticeConfig cfg = parse_config(in);
    cfg.validate();
    return cfg;
}

int site_index(Coord c, int L) {
    return c.x + L * (c.y + L * c.z);
}

Coord site_coords(int idx, int L) {
    if (idx < 0 || idx >= L * L * L)
        throw std::out_of_range("site_coords: index " + std::to_string(idx) + " out of range");
    return {idx % L, (idx / L) % L, idx / (L * L)};
}

std::vector<Coord> momentum_modes(int L) {
    // raw index r in [0, L) maps to n = r for r < ceil(L/2), else r - L
    auto fold = [L](int r) { return r < (L + 1) / 2 ? r : r - L; };
    std::vector<Coord> modes;
    modes.reserve(L * L * L);
    for (int z = 0; z < L; ++z)
        for (int y = 0; y < L; ++y)
            for (int x = 0; x < L; ++x) modes.push_back({fold(x), fold(y), fold(z)});
    return modes;
}

double dispersion(const LatticeConfig& cfg, Coord mode) {
    const double k_unit = 2.0 * M_PI / (cfg.L * cfg.a_fm);
    const double k2 = k_unit * k_unit *
                      (double(mode.x) * mode.x + double(mode.y) * mode.y + double(mode.z) * mode.z);
    return cfg.hbar_c_mev_fm * cfg.hbar_c_mev_fm * k2 / (2.0 * cfg.mass_mev);
}

std::vector<double> kinetic_profile(const LatticeConfig& cfg) {
    cfg.validate();
    const int L = cfg.L, V = cfg.n_sites();
    const auto modes = momentum_modes(L);
    std::vector<double> energy(V);
    for (int m = 0; m < V; ++m) energy[m] = dispersion(cfg, modes[m]);

    std::vector<double> t(V, 0.0);
    for (int d = 0; d < V; ++d) {
        const Coord dc = site_coords(d, L);
        double acc = 0.0;
        for (int m = 0; m < V; ++m) {
            const Coord& n = modes[m];
            const double phase = 2.0 * M_PI * (n.x * dc.x + n.y * dc.y + n.z * dc.z) / L;
            acc += energy[m] * std::cos(phase);
        }
        t[d] = acc / V;
    }
    return t;
}

Eigen::MatrixXd kinetic_matrix(const LatticeConfig& cfg) {
    const int L = cfg.L, V = cfg.n_sites();
    const auto t = kinetic_profile(cfg);
    Eigen::MatrixXd T(V, V);
    for (int l = 0; l < V; ++l) {
        const Coord a = site_coords(l, L);
        for (int lp = 0; lp < V; ++lp) {
            const Coord b = site_coords(lp, L);
            const Coord d{((a.x - b.x) % L + L) % L, ((a.y - b.y) % L + L) % L,
                          ((a.z - b.z) % L + L) % L};
            T(l, lp) = t[site_index(d, L)];
        }
    }
    return T;
}

HopTable hop_table(const LatticeConfig& cfg, double rel_cut) {
    const int L = cfg.L, V = cfg.n_sites();
    const auto t = kinetic_profile(cfg);
    double tmax = 0.0;
    for (double v : t) tmax = std::max(tmax, std::abs(v));
    const double cut = rel_cut * tmax;

    HopTable table;
    table.diagonal = t[0];
    table.targets.resize(V);
    for (int l = 0; l < V; ++l) {
        const Coord a = site_coords(l, L);
        for (int d = 1; d < V; ++d) {
            if (std::abs(t[d]) <= cut) continue;
            const Coord dc = site_coords(d, L);
            const Coord b{(a.x + dc.x) % L, (a.y + dc.y) % L, (a.z + dc.z) % L};
            table.targets[l].emplace_back(site_index(b, L), t[d]);
        }
    }
    return table;
}

} // namespace nuclat

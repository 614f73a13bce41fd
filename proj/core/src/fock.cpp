#include "nuclat/fock.hpp"

#include <algorithm>
#include <stdexcept>

namespace nuclat {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double choose2(int m) { return m * (m - 1) / 2.0; }
double choose3(int m) { return m * (m - 1) * (m - 2) / 6.0; }

std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

FockState make_state(std::span<const Mode> occupied) {
    if (occupied.size() > FockState::kMaxOccupied)
        throw std::invalid_argument("make_state: more than " +
                                    std::to_string(FockState::kMaxOccupied) + " occupied modes");
    FockState s;
    s.count = static_cast<std::uint8_t>(occupied.size());
    std::copy(occupied.begin(), occupied.end(), s.modes.begin());
    std::sort(s.modes.begin(), s.modes.begin() + s.count);
    for (int i = 1; i < s.count; ++i)
        if (s.modes[i] == s.modes[i - 1])
            throw std::invalid_argument("make_state: duplicate mode " +
                                        std::to_string(s.modes[i]));
    return s;
}

FockState make_state(std::initializer_list<Mode> occupied) {
    return make_state(std::span<const Mode>(occupied.begin(), occupied.size()));
}

bool bitset_less(const FockState& a, const FockState& b) {
    // Compare sum of 2^mode: scan shared top modes; the first difference
    // decides, and if one list is a top-aligned prefix of the other the
    // shorter state is the smaller number.
    int ia = a.count - 1, ib = b.count - 1;
    while (ia >= 0 && ib >= 0) {
        if (a.modes[ia] != b.modes[ib]) return a.modes[ia] < b.modes[ib];
        --ia, --ib;
    }
    return ia < ib;
}

std::uint64_t pack_key(const FockState& s) {
    if (s.count > 5) throw std::invalid_argument("pack_key: state has more than 5 particles");
    std::uint64_t key = s.count;
    for (int i = 0; i < s.count; ++i) {
        const Mode m = s.modes[s.count - 1 - i];
        if (m >= 2048) throw std::invalid_argument("pack_key: mode index >= 2048");
        key |= std::uint64_t(m) << (53 - 11 * i);
    }
    return key;
}

FockState unpack_key(std::uint64_t key) {
    FockState s;
    s.count = static_cast<std::uint8_t>(key & 7);
    for (int i = 0; i < s.count; ++i)
        s.modes[s.count - 1 - i] = static_cast<Mode>((key >> (53 - 11 * i)) & 0x7ff);
    return s;
}

std::size_t FockHash::operator()(const FockState& s) const {
    if (s.count <= 5) return splitmix64(pack_key(s));
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a over the mode list
    for (int i = 0; i < s.count; ++i) {
        h ^= s.modes[i];
        h *= 0x100000001b3ULL;
    }
    return splitmix64(h);
}

std::string to_string(const FockState& s, int n_sites) {
    static const char* names[4] = {"pu", "pd", "nu", "nd"};
    std::string out = "{";
    for (int i = 0; i < s.count; ++i) {
        if (i) out += ' ';
        out += names[flavor_of(s.modes[i], n_sites)];
        out += '@';
        out += std::to_string(site_of(s.modes[i], n_sites));
    }
    return out + "}";
}

std::optional<std::pair<FockState, int>> apply_creation(const FockState& s, Mode m) {
    if (s.occupied(m)) return std::nullopt;
    if (s.count == FockState::kMaxOccupied)
        throw std::invalid_argument("apply_creation: state is at capacity");
    const int r = s.rank_below(m);
    FockState out = s;
    for (int i = out.count; i > r; --i) out.modes[i] = out.modes[i - 1];
    out.modes[r] = m;
    ++out.count;
    return std::make_pair(out, (r % 2 == 0) ? 1 : -1);
}

std::optional<std::pair<FockState, int>> apply_annihilation(const FockState& s, Mode m) {
    if (!s.occupied(m)) return std::nullopt;
    const int r = s.rank_below(m);
    FockState out = s;
    for (int i = r; i + 1 < out.count; ++i) out.modes[i] = out.modes[i + 1];
    --out.count;
    return std::make_pair(out, (r % 2 == 0) ? 1 : -1);
}

int jw_sign(const FockState& s, Mode m) {
    return (s.rank_below(m) % 2 == 0) ? 1 : -1;
}

std::pair<FockState, int> apply_mode_permutation(const FockState& s, std::span<const Mode> perm) {
    FockState out;
    out.count = s.count;
    for (int i = 0; i < s.count; ++i) {
        if (s.modes[i] >= perm.size())
            throw std::out_of_range("apply_mode_permutation: permutation table too small");
        out.modes[i] = perm[s.modes[i]];
    }
    // parity of the reordering = parity of inversions in the image list
    int inversions = 0;
    for (int i = 0; i < out.count; ++i)
        for (int j = i + 1; j < out.count; ++j)
            if (out.modes[i] > out.modes[j]) ++inversions;
    std::sort(out.modes.begin(), out.modes.begin() + out.count);
    for (int i = 1; i < out.count; ++i)
        if (out.modes[i] == out.modes[i - 1])
            throw std::invalid_argument("apply_mode_permutation: table is not a permutation");
    return {out, (inversions % 2 == 0) ? 1 : -1};
}

void SectorSpec::validate(int n_sites) const {
    if (n_protons < 0 || n_neutrons < 0)
        throw std::invalid_argument("SectorSpec: negative particle count");
    if (n_protons > 2 * n_sites || n_neutrons > 2 * n_sites)
        throw std::invalid_argument("SectorSpec: particle count exceeds mode count");
    if (n_particles() > FockState::kMaxOccupied)
        throw std::invalid_argument("SectorSpec: more than " +
                                    std::to_string(FockState::kMaxOccupied) + " particles");
    if (two_sz) {
        const int n = n_particles();
        if (std::abs(*two_sz) > n || ((*two_sz - n) % 2) != 0)
            throw std::invalid_argument("SectorSpec: two_sz incompatible with particle number");
    }
}

int two_sz_of(const FockState& s, int n_sites) {
    int v = 0;
    for (int i = 0; i < s.count; ++i) v += is_spin_up(flavor_of(s.modes[i], n_sites)) ? 1 : -1;
    return v;
}

int proton_count_of(const FockState& s, int n_sites) {
    int v = 0;
    for (int i = 0; i < s.count; ++i) v += is_proton(flavor_of(s.modes[i], n_sites)) ? 1 : 0;
    return v;
}

int neutron_count_of(const FockState& s, int n_sites) {
    return s.count - proton_count_of(s, n_sites);
}

namespace {

// Visit ascending k-combinations of sites drawn from [first, V) appended to
// `modes` as flavor `flavor`; if pin_zero, site 0 is forced as a member.
template <class Fn>
void flavor_combinations(int flavor, int k, int V, bool pin_zero, std::vector<Mode>& modes,
                         Fn&& fn) {
    if (k == 0) {
        if (!pin_zero) fn();
        return;
    }
    std::vector<int> sites(k);
    const int first = pin_zero ? 1 : 0;
    const int free_k = pin_zero ? k - 1 : k;
    if (pin_zero) sites[0] = 0;
    if (free_k > V - first) return;
    for (int i = 0; i < free_k; ++i) sites[(pin_zero ? 1 : 0) + i] = first + i;

    const std::size_t base = modes.size();
    modes.resize(base + k);
    for (;;) {
        for (int i = 0; i < k; ++i) modes[base + i] = mode_of(flavor, sites[i], V);
        fn();
        // advance the free part of the combination
        int i = k - 1;
        const int lo = pin_zero ? 1 : 0;
        while (i >= lo && sites[i] == V - 1 - (k - 1 - i)) --i;
        if (i < lo) break;
        ++sites[i];
        for (int j = i + 1; j < k; ++j) sites[j] = sites[j - 1] + 1;
    }
    modes.resize(base);
}

// Iterate flavor-count splits (p-up, p-down, n-up, n-down) of the sector and
// hand each split's combination product to `fn`. pin = lowest occupied flavor
// must contain site 0 (used by the pinned stream); -1 disables pinning.
template <class Fn>
void for_each_split_state(const LatticeConfig& cfg, const SectorSpec& sector, bool pinned,
                          Fn&& fn) {
    const int V = cfg.n_sites();
    sector.validate(V);
    for (int pu = std::max(0, sector.n_protons - V); pu <= std::min(sector.n_protons, V); ++pu) {
        const int pd = sector.n_protons - pu;
        for (int nu = std::max(0, sector.n_neutrons - V); nu <= std::min(sector.n_neutrons, V);
             ++nu) {
            const int nd = sector.n_neutrons - nu;
            if (sector.two_sz && (pu - pd + nu - nd) != *sector.two_sz) continue;
            const int counts[4] = {pu, pd, nu, nd};
            int pin_flavor = -1;
            if (pinned)
                for (int f = 0; f < 4; ++f)
                    if (counts[f] > 0) {
                        pin_flavor = f;
                        break;
                    }
            std::vector<Mode> modes;
            modes.reserve(sector.n_particles());
            // nested combination loops, innermost flavor last
            auto level3 = [&] { fn(make_state(std::span<const Mode>(modes))); };
            auto level2 = [&] {
                flavor_combinations(3, counts[3], V, pin_flavor == 3, modes, level3);
            };
            auto level1 = [&] {
                flavor_combinations(2, counts[2], V, pin_flavor == 2, modes, level2);
            };
            auto level0 = [&] {
                flavor_combinations(1, counts[1], V, pin_flavor == 1, modes, level1);
            };
            flavor_combinations(0, counts[0], V, pin_flavor == 0, modes, level0);
        }
    }
}

} // namespace

std::vector<FockState> enumerate_sector(const LatticeConfig& cfg, const SectorSpec& sector) {
    const int V = cfg.n_sites();
    sector.validate(V);
    std::uint64_t size = 0;
    for (int pu = 0; pu <= sector.n_protons; ++pu)
        for (int nu = 0; nu <= sector.n_neutrons; ++nu) {
            const int pd = sector.n_protons - pu, nd = sector.n_neutrons - nu;
            if (sector.two_sz && (pu - pd + nu - nd) != *sector.two_sz) continue;
            size += binomial(V, pu) * binomial(V, pd) * binomial(V, nu) * binomial(V, nd);
        }
    if (size > (1u << 24))
        throw std::invalid_argument("enumerate_sector: sector too large to materialize (" +
                                    std::to_string(size) + " states)");
    std::vector<FockState> states;
    states.reserve(size);
    for_each_split_state(cfg, sector, false, [&](const FockState& s) { states.push_back(s); });
    std::sort(states.begin(), states.end(), bitset_less);
    return states;
}

void for_each_pinned_state(const LatticeConfig& cfg, const SectorSpec& sector,
                           const std::function<void(const FockState&)>& fn) {
    for_each_split_state(cfg, sector, true, fn);
}

double pair_count(const FockState& s, int n_sites) {
    double acc = 0.0;
    int i = 0;
    // multiplicities are per site; gather by scanning all occupied modes
    std::array<int, FockState::kMaxOccupied> sites{};
    std::array<int, FockState::kMaxOccupied> mult{};
    int distinct = 0;
    for (; i < s.count; ++i) {
        const int site = site_of(s.modes[i], n_sites);
        bool found = false;
        for (int j = 0; j < distinct; ++j)
            if (sites[j] == site) {
                ++mult[j];
                found = true;
                break;
            }
        if (!found) {
            sites[distinct] = site;
            mult[distinct++] = 1;
        }
    }
    for (int j = 0; j < distinct; ++j) acc += choose2(mult[j]);
    return acc;
}

double triple_count(const FockState& s, int n_sites) {
    std::array<int, FockState::kMaxOccupied> sites{};
    std::array<int, FockState::kMaxOccupied> mult{};
    int distinct = 0;
    for (int i = 0; i < s.count; ++i) {
        const int site = site_of(s.modes[i], n_sites);
        bool found = false;
        for (int j = 0; j < distinct; ++j)
            if (sites[j] == site) {
                ++mult[j];
                found = true;
                break;
            }
        if (!found) {
            sites[distinct] = site;
            mult[distinct++] = 1;
        }
    }
    double acc = 0.0;
    for (int j = 0; j < distinct; ++j) acc += choose3(mult[j]);
    return acc;
}

double interaction_diagonal(const FockState& s, const LatticeConfig& cfg) {
    const int V = cfg.n_sites();
    return cfg.c2_mev * pair_count(s, V) + cfg.c3_mev * triple_count(s, V);
}

std::vector<FockTerm> apply_hamiltonian(const FockState& s, const LatticeConfig& cfg,
                                        const HopTable& hops) {
    const int V = cfg.n_sites();
    std::vector<FockTerm> terms;
    terms.reserve(1 + s.count * (hops.targets.empty() ? 0 : hops.targets[0].size()));
    terms.push_back({s, s.count * hops.diagonal + interaction_diagonal(s, cfg)});

    for (int i = 0; i < s.count; ++i) {
        const Mode m = s.modes[i];
        const int flavor = flavor_of(m, V), site = site_of(m, V);
        const int sign_out = (i % 2 == 0) ? 1 : -1; // rank_below(m) == i
        for (const auto& [target_site, amp] : hops.targets[site]) {
            const Mode mp = mode_of(flavor, target_site, V);
            if (s.occupied(mp)) continue;
            int r = s.rank_below(mp);
            if (m < mp) --r; // m was removed before mp is inserted
            const int sign_in = (r % 2 == 0) ? 1 : -1;
            FockState out = s;
            // remove m (slot i), insert mp, keeping the list sorted
            int j = i;
            for (; j + 1 < out.count && out.modes[j + 1] < mp; ++j) out.modes[j] = out.modes[j + 1];
            for (; j > 0 && out.modes[j - 1] > mp; --j) out.modes[j] = out.modes[j - 1];
            out.modes[j] = mp;
            terms.push_back({out, amp * sign_out * sign_in});
        }
    }
    return terms;
}

} // namespace nuclat

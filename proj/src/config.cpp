#include "mmot/config.hpp"

#include <cstdio>
#include <sstream>

namespace mmot {

std::string config_hash(const RunConfig& cfg) {
    std::ostringstream ss;
    ss << cfg.seed << '|' << cfg.k_cutoff << '|' << cfg.mass_tol << '|' << cfg.atom_tol << '|'
       << cfg.cloud_tol << '|' << cfg.dual_tol << '|' << cfg.expand_cap << '|'
       << cfg.cost_pair_cap << '|' << cfg.max_sample_weight_fraction << '|'
       << cfg.duplicate_mass_factor;
    const std::string s = ss.str();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace mmot

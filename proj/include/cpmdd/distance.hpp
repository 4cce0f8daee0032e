#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cpmdd/format.hpp"

namespace cpmdd {

// e = a - a~, entries even with |e_i| <= 2(M-1), e_0 != 0. Entries past
// the end are zero.
struct DifferenceSequence {
    std::vector<int> e;

    int depth() const { return static_cast<int>(e.size()); }
    std::string to_string() const;  // space separated, trailing zeros dropped
};

// Energy per information bit of the differential signal, Es^2/(4 Ts log2 M).
double differential_bit_energy(const CpmFormat& format);

// Squared normalised distance between differential signals at delay K:
// (log2 M / Ts) * integral over [0, n_obs Ts) of 1 - cos Theta_K(t, e),
// left-point rule on the sample grid.
double diff_distance(const CpmFormat& format, int K, const DifferenceSequence& e, int n_obs);

// Every sequence of length `depth` with e_0 in {2, 4, ..., 2(M-1)} and the
// remaining entries in {-2(M-1), ..., 2(M-1)}, lexicographic order.
class DifferenceEnumerator {
public:
    DifferenceEnumerator(int M, int depth);

    bool next(DifferenceSequence& out);
    static std::uint64_t count(int M, int depth);  // (M-1) (2M-1)^(depth-1)

private:
    int M_;
    std::vector<int> digits_;  // digit 0 in [0, M-1), others in [0, 2M-1)
    bool started_ = false;
    bool done_ = false;
};

struct DistanceEntry {
    DifferenceSequence e;
    double d2 = 0.0;
};

struct DistanceReport {
    int K = 1;
    int depth = 0;
    int n_obs = 0;
    double d2_min = 0.0;
    DifferenceSequence argmin_e;
    double delta2_min = 0.0;  // unnormalised, 2 * eps_b * d2_min
    std::vector<DistanceEntry> per_e;  // filled only on request
};

// Default search window for delay K: depth K+L+4, observation depth+K+L+2.
int default_depth(const CpmFormat& format, int K);
int default_observation(const CpmFormat& format, int K, int depth);

// Minimum over all enumerated difference sequences. Walks the difference
// tree depth-first in enumeration order and drops subtrees whose partial
// distance already exceeds the best complete one; the result (value and
// first minimiser in enumeration order) equals dmin_exhaustive.
DistanceReport dmin(const CpmFormat& format, int K, int depth = 0, int n_obs = 0);

// Plain enumeration + diff_distance on every sequence.
DistanceReport dmin_exhaustive(const CpmFormat& format, int K, int depth = 0, int n_obs = 0, bool keep_table = false);

// Random-pair cross-check: minimum over `trials` random symbol pairs of
// length depth with a_0 != a~_0. Always >= the exhaustive minimum.
DistanceReport dmin_random_pairs(const CpmFormat& format, int K, int trials, std::uint64_t seed, int depth = 0,
                                 int n_obs = 0);

struct DelayChoice {
    int K = 1;
    std::vector<DistanceReport> reports;  // K = 1 .. k_max
};

// Near-tie tolerance for delay selection, in dB of d2_min.
inline constexpr double kDelayTieToleranceDb = 0.05;

// Smallest K in [1, k_max] whose d2_min is within tie_tolerance_db of the best.
// depth / n_obs of 0 use the per-K defaults.
DelayChoice optimize_delay(const CpmFormat& format, int k_max, int depth = 0, int n_obs = 0,
                           double tie_tolerance_db = kDelayTieToleranceDb);

// Q( sqrt( 4 eps_b / (N0^2 + 2 A^2 N0) * d2_min ) ), N0 from Eb/N0.
double predict_pe(const CpmFormat& format, int K, double d2_min, double ebn0_db);

double q_function(double x);

}  // namespace cpmdd

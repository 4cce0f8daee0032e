#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cpmdd/distance.hpp"
#include "cpmdd/format.hpp"

namespace cpmdd {

enum class DetectorKind { Differential, Coherent };

std::string to_string(DetectorKind d);
DetectorKind parse_detector(const std::string& s);

struct PhaseMode {
    bool random = true;   // uniform in [0, 2 pi) per frame
    double value = 0.0;   // used when !random

    static PhaseMode parse(const std::string& s);  // "random" or radians
};

struct ExperimentConfig {
    CpmFormat format;
    DetectorKind detector = DetectorKind::Differential;
    int K = 1;
    std::vector<double> ebn0_grid;
    int payload_len = 120;
    long long max_frames = 2'000'000;
    long long target_errors = 200;
    PhaseMode phase;
    double fd = 0.0;
    std::uint64_t master_seed = 1;
    int workers = 1;
    int batch = 32;  // frames per stop-criterion check

    void validate();
};

// "start:step:stop" (inclusive) or a single value. "inf" is a noiseless point.
std::vector<double> parse_ebn0_grid(const std::string& s);

struct BerPoint {
    double ebn0_db = 0.0;
    std::string detector;  // diff, coherent, diff_doppler, coherent_doppler
    int K = 0;             // 0 for coherent
    long long bits = 0;
    long long errors = 0;
    double ber = 0.0;
    long long frames = 0;
    bool low_confidence = true;
    std::uint64_t seed = 0;  // stream seed of the point
};

// 95% normal-approximation half width above half the estimate (or no errors).
bool is_low_confidence(long long errors, long long bits);

// Frames until target_errors or max_frames per Eb/N0 point. Frame f of point
// i draws everything from derive_seed(master_seed, i, f), so results do not
// depend on the worker count.
std::vector<BerPoint> run_ber(const ExperimentConfig& config);

// Bit errors of one frame, exposed for tests.
long long simulate_frame(const ExperimentConfig& config, int ebn0_index, long long frame_index);

std::vector<DistanceReport> run_dmin_sweep(const CpmFormat& format, int k_first, int k_last, int depth = 0,
                                           int n_obs = 0);

struct DopplerComparison {
    std::vector<BerPoint> diff;
    std::vector<BerPoint> diff_doppler;
    std::vector<BerPoint> coherent;
    std::vector<BerPoint> coherent_doppler;

    std::vector<BerPoint> all() const;
};

// Differential (delay config.K) and coherent detection with and without the
// frequency offset config.fd, all four on identical frame seeds.
DopplerComparison run_doppler_compare(const ExperimentConfig& config);

// Eb/N0 at which log10(BER) crosses log10(target), linear interpolation
// between grid points. NaN if the curve never crosses.
double ebn0_at_ber(const std::vector<BerPoint>& curve, double target);

}  // namespace cpmdd

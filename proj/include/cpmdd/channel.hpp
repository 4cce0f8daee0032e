#pragma once

#include <cstdint>

#include "cpmdd/format.hpp"
#include "cpmdd/waveform.hpp"

namespace cpmdd {

struct ChannelParams {
    double psi = 0.0;  // carrier phase offset, radians
    double fd = 0.0;   // frequency offset, Hz
    double N0 = 0.0;   // noise level; double-sided PSD is N0/2
    std::uint64_t seed = 0;
};

// N0 = Es / (log2(M) * 10^(ebn0_db/10)).
double noise_level_from_ebn0(const CpmFormat& format, double ebn0_db);

// r_k = s_k exp(j(2 pi fd t_k + psi)) + n_k, with n_k circular Gaussian of
// variance N0 / sample_period per complex sample. Bit-identical for equal seeds.
BasebandSignal apply_channel(const BasebandSignal& s, const ChannelParams& p);

// Stream seed for (master, i, j) via splitmix64 mixing.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i, std::uint64_t j = 0);

}  // namespace cpmdd

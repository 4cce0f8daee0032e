#include "cpmdd/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cpmdd/errors.hpp"

namespace cpmdd {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

double noise_level_from_ebn0(const CpmFormat& format, double ebn0_db)
{
    return format.Es / (format.log2M() * std::pow(10.0, ebn0_db / 10.0));
}

BasebandSignal apply_channel(const BasebandSignal& s, const ChannelParams& p)
{
    if (s.empty()) throw InputError("apply_channel: empty signal");
    if (!(p.N0 >= 0.0)) throw ConfigError("noise level N0 must be >= 0");

    BasebandSignal r = s;
    const double w = 2.0 * std::numbers::pi * p.fd;
    for (std::size_t k = 0; k < r.size(); ++k) {
        const double rot = p.fd == 0.0 ? p.psi : w * s.time(k) + p.psi;
        r.samples[k] = s.samples[k] * std::polar(1.0, rot);
    }
    if (p.N0 > 0.0) {
        std::mt19937_64 rng(p.seed);
        std::normal_distribution<double> gauss(0.0, std::sqrt(p.N0 / (2.0 * s.sample_period)));
        for (auto& x : r.samples) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            x += cplx(re, im);
        }
    }
    return r;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i, std::uint64_t j)
{
    return splitmix64(splitmix64(splitmix64(master) ^ i) ^ (j * 0xd1b54a32d192ed03ULL + 1));
}

}  // namespace cpmdd

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "cpmdd/format.hpp"

namespace cpmdd {

using cplx = std::complex<double>;

// Uniformly sampled complex envelope. Sample k sits at start_time + k * sample_period.
struct BasebandSignal {
    std::vector<cplx> samples;
    double sample_period = 1.0;
    double start_time = 0.0;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
    double time(std::size_t k) const { return start_time + static_cast<double>(k) * sample_period; }
    double duration() const { return static_cast<double>(samples.size()) * sample_period; }
};

// Frequency pulse g(t) and phase pulse q(t) of a format.
//
// REC and RC use their closed forms. The Gaussian pulse is centred on its
// truncation window [0, L*Ts) and rescaled so that q(L*Ts) is exactly 1/2;
// q uses the closed-form antiderivative of the Q-function difference, so g
// and q stay mutually consistent.
class PulseShape {
public:
    explicit PulseShape(const CpmFormat& format);

    double freq(double t) const;   // g(t), 1/s
    double phase(double t) const;  // q(t)

    // q sampled on the receiver grid: entry i*sps + m is q(i*Ts + m*Ts/sps), i in [0, L).
    std::span<const double> grid() const { return grid_; }
    double grid_at(int i, int m) const;  // 0 for i < 0, 1/2 for i >= L

    const CpmFormat& format() const { return format_; }

private:
    double gaussian_raw_freq(double t) const;
    double gaussian_raw_phase(double t) const;

    CpmFormat format_;
    double gauss_a_ = 0.0;      // 2*pi*B/sqrt(ln 2), 1/s
    double gauss_scale_ = 1.0;  // restores q(L*Ts) = 1/2 after truncation
    std::vector<double> grid_;
};

double freq_pulse_eval(const CpmFormat& format, double t);
double phase_pulse_eval(const CpmFormat& format, double t);

// theta(t, a) at an arbitrary time, for symbols starting at t = 0.
double phase_at(const PulseShape& pulse, std::span<const int> a, double t);

// theta(t, a) on the grid k*Ts/sps, k in [0, N*sps).
std::vector<double> phase_trajectory(const CpmFormat& format, std::span<const int> a);
std::vector<double> phase_trajectory(const PulseShape& pulse, std::span<const int> a);

// s(t, a) = sqrt(Es/Ts) exp(j theta(t, a)) on the same grid, start_time 0.
BasebandSignal modulate(const CpmFormat& format, std::span<const int> a);
BasebandSignal modulate(const PulseShape& pulse, std::span<const int> a);

}  // namespace cpmdd

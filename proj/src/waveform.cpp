#include "cpmdd/waveform.hpp"

#include <cmath>
#include <numbers>

#include "cpmdd/errors.hpp"

namespace cpmdd {

namespace {

constexpr double kPi = std::numbers::pi;

double qfunc(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// Antiderivative of the Q-function: d/dx [x Q(x) - phi(x)] = Q(x).
double qfunc_integral(double x)
{
    const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
    return x * qfunc(x) - phi;
}

}  // namespace

PulseShape::PulseShape(const CpmFormat& format) : format_(format.validated())
{
    const auto& f = format_;
    if (f.pulse == PulseFamily::Gaussian) {
        const double B = f.bt / f.Ts;
        gauss_a_ = 2.0 * kPi * B / std::sqrt(std::log(2.0));
        gauss_scale_ = 0.5 / gaussian_raw_phase(f.L * f.Ts);
    }
    grid_.resize(static_cast<std::size_t>(f.L) * f.sps);
    for (int i = 0; i < f.L; ++i)
        for (int m = 0; m < f.sps; ++m)
            grid_[static_cast<std::size_t>(i) * f.sps + m] = phase(i * f.Ts + m * f.Ts / f.sps);
}

double PulseShape::gaussian_raw_freq(double t) const
{
    const double T = format_.Ts;
    const double c = 0.5 * format_.L * T;
    return (qfunc(gauss_a_ * (t - c - 0.5 * T)) - qfunc(gauss_a_ * (t - c + 0.5 * T))) / (2.0 * T);
}

double PulseShape::gaussian_raw_phase(double t) const
{
    const double T = format_.Ts;
    const double c = 0.5 * format_.L * T;
    auto F = [&](double x) {
        return (qfunc_integral(gauss_a_ * (x - c - 0.5 * T)) - qfunc_integral(gauss_a_ * (x - c + 0.5 * T))) /
               (2.0 * T * gauss_a_);
    };
    return F(t) - F(0.0);
}

double PulseShape::freq(double t) const
{
    const double T = format_.Ts;
    const double LT = format_.L * T;
    if (t < 0.0 || t >= LT) return 0.0;
    switch (format_.pulse) {
    case PulseFamily::Rec: return 1.0 / (2.0 * LT);
    case PulseFamily::Rc: return (1.0 - std::cos(2.0 * kPi * t / LT)) / (2.0 * LT);
    case PulseFamily::Gaussian: return gauss_scale_ * gaussian_raw_freq(t);
    }
    return 0.0;
}

double PulseShape::phase(double t) const
{
    const double LT = format_.L * format_.Ts;
    if (t <= 0.0) return 0.0;
    if (t >= LT) return 0.5;
    switch (format_.pulse) {
    case PulseFamily::Rec: return t / (2.0 * LT);
    case PulseFamily::Rc: return t / (2.0 * LT) - std::sin(2.0 * kPi * t / LT) / (4.0 * kPi);
    case PulseFamily::Gaussian: return gauss_scale_ * gaussian_raw_phase(t);
    }
    return 0.0;
}

double PulseShape::grid_at(int i, int m) const
{
    if (i < 0) return 0.0;
    if (i >= format_.L) return 0.5;
    return grid_[static_cast<std::size_t>(i) * format_.sps + m];
}

double freq_pulse_eval(const CpmFormat& format, double t) { return PulseShape(format).freq(t); }

double phase_pulse_eval(const CpmFormat& format, double t) { return PulseShape(format).phase(t); }

double phase_at(const PulseShape& pulse, std::span<const int> a, double t)
{
    const auto& f = pulse.format();
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * pulse.phase(t - static_cast<double>(i) * f.Ts);
    return 2.0 * kPi * f.h.value() * acc;
}

std::vector<double> phase_trajectory(const PulseShape& pulse, std::span<const int> a)
{
    const auto& f = pulse.format();
    const int N = static_cast<int>(a.size());
    const double pih = kPi * f.h.value();
    std::vector<double> theta(static_cast<std::size_t>(N) * f.sps);
    long long saturated = 0;  // sum of a_i for i <= n - L
    for (int n = 0; n < N; ++n) {
        if (n - f.L >= 0) saturated += a[n - f.L];
        for (int m = 0; m < f.sps; ++m) {
            double active = 0.0;
            for (int i = 0; i < f.L && n - i >= 0; ++i) active += a[n - i] * pulse.grid_at(i, m);
            theta[static_cast<std::size_t>(n) * f.sps + m] = pih * static_cast<double>(saturated) + 2.0 * pih * active;
        }
    }
    return theta;
}

std::vector<double> phase_trajectory(const CpmFormat& format, std::span<const int> a)
{
    return phase_trajectory(PulseShape(format), a);
}

BasebandSignal modulate(const PulseShape& pulse, std::span<const int> a)
{
    if (a.empty()) throw InputError("modulate: empty symbol sequence");
    const auto& f = pulse.format();
    const auto theta = phase_trajectory(pulse, a);
    BasebandSignal s;
    s.sample_period = f.sample_period();
    s.start_time = 0.0;
    s.samples.resize(theta.size());
    const double A = f.amplitude();
    for (std::size_t k = 0; k < theta.size(); ++k) s.samples[k] = std::polar(A, theta[k]);
    return s;
}

BasebandSignal modulate(const CpmFormat& format, std::span<const int> a)
{
    return modulate(PulseShape(format), a);
}

}  // namespace cpmdd

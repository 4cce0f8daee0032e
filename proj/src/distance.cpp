#include "cpmdd/distance.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "cpmdd/channel.hpp"
#include "cpmdd/errors.hpp"
#include "cpmdd/waveform.hpp"

namespace cpmdd {

namespace {

// Theta_K(t, e) on section n is sum_j e_{n-j} w[j][m] with
// w[j][m] = 2 pi h (q(j Ts + tau_m) - q((j-K) Ts + tau_m)), zero for j >= K+L.
class DistanceKernel {
public:
    DistanceKernel(const CpmFormat& format, int K)
        : sps_(format.sps), span_(K + format.L), scale_(format.log2M() / format.sps)
    {
        const PulseShape pulse(format);
        const double twopih = 2.0 * std::numbers::pi * format.h.value();
        w_.resize(static_cast<std::size_t>(span_) * sps_);
        for (int j = 0; j < span_; ++j)
            for (int m = 0; m < sps_; ++m)
                w_[static_cast<std::size_t>(j) * sps_ + m] = twopih * (pulse.grid_at(j, m) - pulse.grid_at(j - K, m));
        theta_.resize(static_cast<std::size_t>(sps_));
    }

    // Normalised contribution of section n, e zero outside [0, len).
    double section(const int* e, int len, int n)
    {
        std::fill(theta_.begin(), theta_.end(), 0.0);
        for (int j = 0; j < span_; ++j) {
            const int i = n - j;
            if (i < 0) break;
            if (i >= len || e[i] == 0) continue;
            const double* wj = w_.data() + static_cast<std::size_t>(j) * sps_;
            for (int m = 0; m < sps_; ++m) theta_[static_cast<std::size_t>(m)] += e[i] * wj[m];
        }
        double acc = 0.0;
        for (double th : theta_) acc += 1.0 - std::cos(th);
        return acc * scale_;
    }

private:
    int sps_;
    int span_;
    double scale_;
    std::vector<double> w_;
    std::vector<double> theta_;
};

void check_window(const CpmFormat& format, int K, int depth, int n_obs)
{
    if (K < 1) throw InputError("delay K must be >= 1");
    if (depth < 1) throw InputError("difference depth must be >= 1");
    if (n_obs < depth + K + format.L)
        throw InputError("observation of " + std::to_string(n_obs) + " symbols is shorter than depth+K+L = " +
                         std::to_string(depth + K + format.L));
}

struct Window {
    int depth;
    int n_obs;
};

Window resolve_window(const CpmFormat& format, int K, int depth, int n_obs)
{
    Window w{depth > 0 ? depth : default_depth(format, K), 0};
    w.n_obs = n_obs > 0 ? n_obs : default_observation(format, K, w.depth);
    check_window(format, K, w.depth, w.n_obs);
    return w;
}

DistanceReport make_report(int K, const Window& w)
{
    DistanceReport r;
    r.K = K;
    r.depth = w.depth;
    r.n_obs = w.n_obs;
    r.d2_min = std::numeric_limits<double>::infinity();
    return r;
}

void finish_report(const CpmFormat& format, DistanceReport& r)
{
    r.delta2_min = 2.0 * differential_bit_energy(format) * r.d2_min;
}

}  // namespace

std::string DifferenceSequence::to_string() const
{
    int last = static_cast<int>(e.size()) - 1;
    while (last > 0 && e[static_cast<std::size_t>(last)] == 0) --last;
    std::ostringstream os;
    for (int i = 0; i <= last; ++i) os << (i ? " " : "") << e[static_cast<std::size_t>(i)];
    return os.str();
}

double differential_bit_energy(const CpmFormat& format)
{
    return format.Es * format.Es / (4.0 * format.Ts * format.log2M());
}

double diff_distance(const CpmFormat& fmt, int K, const DifferenceSequence& e, int n_obs)
{
    const auto format = fmt.validated();
    if (e.e.empty() || e.e[0] == 0) throw InputError("difference sequence must start with a nonzero entry");
    for (int v : e.e)
        if (v % 2 != 0 || std::abs(v) > 2 * (format.M - 1))
            throw InputError("difference entry " + std::to_string(v) + " is not an even value within +-2(M-1)");
    check_window(format, K, e.depth(), n_obs);
    DistanceKernel kernel(format, K);
    double total = 0.0;
    for (int n = 0; n < n_obs; ++n) total += kernel.section(e.e.data(), e.depth(), n);
    return total;
}

DifferenceEnumerator::DifferenceEnumerator(int M, int depth) : M_(M), digits_(static_cast<std::size_t>(depth), 0)
{
    if (M < 2 || M % 2) throw InputError("alphabet size must be even and >= 2");
    if (depth < 1) throw InputError("difference depth must be >= 1");
}

bool DifferenceEnumerator::next(DifferenceSequence& out)
{
    if (done_) return false;
    if (started_) {
        int p = static_cast<int>(digits_.size()) - 1;
        for (; p >= 0; --p) {
            const int radix = p == 0 ? M_ - 1 : 2 * M_ - 1;
            if (++digits_[static_cast<std::size_t>(p)] < radix) break;
            digits_[static_cast<std::size_t>(p)] = 0;
        }
        if (p < 0) {
            done_ = true;
            return false;
        }
    }
    started_ = true;
    out.e.resize(digits_.size());
    out.e[0] = 2 * (digits_[0] + 1);
    for (std::size_t i = 1; i < digits_.size(); ++i) out.e[i] = 2 * (digits_[i] - (M_ - 1));
    return true;
}

std::uint64_t DifferenceEnumerator::count(int M, int depth)
{
    std::uint64_t n = static_cast<std::uint64_t>(M - 1);
    for (int i = 1; i < depth; ++i) n *= static_cast<std::uint64_t>(2 * M - 1);
    return n;
}

int default_depth(const CpmFormat& format, int K) { return K + format.L + 4; }

int default_observation(const CpmFormat& format, int K, int depth) { return depth + K + format.L + 2; }

DistanceReport dmin(const CpmFormat& fmt, int K, int depth, int n_obs)
{
    const auto format = fmt.validated();
    const Window w = resolve_window(format, K, depth, n_obs);
    DistanceReport report = make_report(K, w);
    DistanceKernel kernel(format, K);

    const int D = w.depth;
    const int top = 2 * (format.M - 1);
    std::vector<int> e(static_cast<std::size_t>(D), 0);
    std::vector<double> partial(static_cast<std::size_t>(D) + 1, 0.0);
    double& best = report.d2_min;

    // Iterative DFS; values at each position run in enumeration order.
    std::vector<int> value(static_cast<std::size_t>(D), 0);
    int p = 0;
    value[0] = 2;
    while (p >= 0) {
        auto& v = value[static_cast<std::size_t>(p)];
        if (v > top) {
            --p;
            if (p >= 0) value[static_cast<std::size_t>(p)] += 2;
            continue;
        }
        e[static_cast<std::size_t>(p)] = v;
        const double here = partial[static_cast<std::size_t>(p)] + kernel.section(e.data(), D, p);
        if (here >= best) {
            v += 2;
            continue;
        }
        if (p + 1 < D) {
            partial[static_cast<std::size_t>(p) + 1] = here;
            ++p;
            value[static_cast<std::size_t>(p)] = -top;
            continue;
        }
        double total = here;
        for (int n = D; n < w.n_obs && total < best; ++n) total += kernel.section(e.data(), D, n);
        if (total < best) {
            best = total;
            report.argmin_e.e = e;
        }
        v += 2;
    }
    finish_report(format, report);
    return report;
}

DistanceReport dmin_exhaustive(const CpmFormat& fmt, int K, int depth, int n_obs, bool keep_table)
{
    const auto format = fmt.validated();
    const Window w = resolve_window(format, K, depth, n_obs);
    DistanceReport report = make_report(K, w);
    DifferenceEnumerator it(format.M, w.depth);
    DifferenceSequence e;
    while (it.next(e)) {
        const double d2 = diff_distance(format, K, e, w.n_obs);
        if (keep_table) report.per_e.push_back({e, d2});
        if (d2 < report.d2_min) {
            report.d2_min = d2;
            report.argmin_e = e;
        }
    }
    finish_report(format, report);
    return report;
}

DistanceReport dmin_random_pairs(const CpmFormat& fmt, int K, int trials, std::uint64_t seed, int depth, int n_obs)
{
    const auto format = fmt.validated();
    const Window w = resolve_window(format, K, depth, n_obs);
    DistanceReport report = make_report(K, w);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, format.M - 1);
    DifferenceSequence e;
    e.e.resize(static_cast<std::size_t>(w.depth));
    for (int t = 0; t < trials; ++t) {
        for (int i = 0; i < w.depth; ++i) {
            int a = format.symbol(pick(rng));
            int b = format.symbol(pick(rng));
            while (i == 0 && a == b) b = format.symbol(pick(rng));
            e.e[static_cast<std::size_t>(i)] = a - b;
        }
        if (e.e[0] < 0)
            for (auto& v : e.e) v = -v;
        const double d2 = diff_distance(format, K, e, w.n_obs);
        if (d2 < report.d2_min) {
            report.d2_min = d2;
            report.argmin_e = e;
        }
    }
    finish_report(format, report);
    return report;
}

DelayChoice optimize_delay(const CpmFormat& fmt, int k_max, int depth, int n_obs, double tie_tolerance_db)
{
    if (k_max < 1) throw ConfigError("k_max must be >= 1");
    const auto format = fmt.validated();
    DelayChoice choice;
    double best = 0.0;
    for (int K = 1; K <= k_max; ++K) {
        choice.reports.push_back(dmin(format, K, depth, n_obs));
        best = std::max(best, choice.reports.back().d2_min);
    }
    const double floor = best * std::pow(10.0, -tie_tolerance_db / 10.0);
    choice.K = 1;
    for (const auto& r : choice.reports)
        if (r.d2_min >= floor) {
            choice.K = r.K;
            break;
        }
    return choice;
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double predict_pe(const CpmFormat& fmt, int /*K*/, double d2_min, double ebn0_db)
{
    if (d2_min < 0.0) throw InputError("d2_min must be >= 0");
    const auto format = fmt.validated();
    const double eps_b = differential_bit_energy(format);
    const double A2 = format.Es / format.Ts;
    const double N0 = noise_level_from_ebn0(format, ebn0_db);
    return q_function(std::sqrt(4.0 * eps_b / (N0 * N0 + 2.0 * A2 * N0) * d2_min));
}

}  // namespace cpmdd

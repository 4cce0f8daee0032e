#include "cpmdd/differential.hpp"

#include <cmath>
#include <numbers>

#include "cpmdd/errors.hpp"

namespace cpmdd {

namespace {

std::size_t checked_power(int base, int exponent, std::size_t budget, const char* what)
{
    std::size_t count = 1;
    for (int i = 0; i < exponent; ++i) {
        count *= static_cast<std::size_t>(base);
        if (count > budget)
            throw CapacityError(std::string(what) + " needs more than " + std::to_string(budget) + " states (" +
                                    std::to_string(base) + "^" + std::to_string(exponent) + ")",
                                count);
    }
    return count;
}

}  // namespace

BasebandSignal differential_preprocess(const BasebandSignal& r, int K, const CpmFormat& format)
{
    if (K < 1) throw InputError("differential delay K must be >= 1");
    const std::size_t lag = static_cast<std::size_t>(K) * static_cast<std::size_t>(format.sps);
    if (r.size() < lag)
        throw InputError("signal of " + std::to_string(r.size()) + " samples is shorter than K*Ts (" +
                         std::to_string(lag) + " samples)");
    BasebandSignal out;
    out.sample_period = r.sample_period;
    out.start_time = r.time(lag);
    out.samples.resize(r.size() - lag);
    for (std::size_t k = 0; k < out.size(); ++k) out.samples[k] = 0.5 * r.samples[k + lag] * std::conj(r.samples[k]);
    return out;
}

DiffState DiffTrellis::state(std::uint32_t index) const
{
    DiffState st;
    st.index = index;
    st.history.resize(static_cast<std::size_t>(memory));
    std::uint32_t rest = index;
    for (int d = 0; d < memory; ++d) {
        st.history[static_cast<std::size_t>(memory - 1 - d)] = format.symbol(static_cast<int>(rest % format.M));
        rest /= static_cast<std::uint32_t>(format.M);
    }
    return st;
}

std::uint32_t DiffTrellis::state_index(std::span<const int> history) const
{
    if (static_cast<int>(history.size()) != memory) throw InputError("state history must hold K+L-1 symbols");
    std::uint32_t index = 0;
    for (int a : history) index = index * static_cast<std::uint32_t>(format.M) + static_cast<std::uint32_t>(format.symbol_index(a));
    return index;
}

std::uint32_t DiffTrellis::all_ones_state() const
{
    return state_index(std::vector<int>(static_cast<std::size_t>(memory), +1));
}

DiffTrellis build_diff_trellis(const CpmFormat& fmt, int K, std::size_t state_budget)
{
    if (K < 1) throw ConfigError("differential delay K must be >= 1");
    DiffTrellis dt;
    dt.format = fmt.validated();
    dt.K = K;
    const auto& f = dt.format;
    const int L = f.L;
    const int M = f.M;
    dt.memory = K + L - 1;
    const std::size_t S = checked_power(M, dt.memory, state_budget, "differential trellis");
    dt.trellis.allocate(M, f.sps, S);

    const PulseShape pulse(f);
    const double pih = std::numbers::pi * f.h.value();
    const int two_den = 2 * f.h.den;

    // hist[i] = a_{n-1-i}, i in [0, K+L-1)
    std::vector<int> hist(static_cast<std::size_t>(dt.memory));
    for (std::size_t s = 0; s < S; ++s) {
        std::size_t rest = s;
        for (int i = 0; i < dt.memory; ++i) {
            hist[static_cast<std::size_t>(i)] = f.symbol(static_cast<int>(rest % static_cast<std::size_t>(M)));
            rest /= static_cast<std::size_t>(M);
        }
        auto past = [&](int lag) { return hist[static_cast<std::size_t>(lag - 1)]; };  // a_{n-lag}

        // Constant part, reduced exactly in units of pi/den.
        long long sum = 0;
        for (int i = 0; i < K; ++i) sum += past(L + i);
        long long residue = (f.h.num * sum) % two_den;
        if (residue < 0) residue += two_den;
        const double phi = std::numbers::pi * static_cast<double>(residue) / f.h.den;

        for (int j = 0; j < M; ++j) {
            const int a_n = f.symbol(j);
            const std::size_t b = dt.trellis.branch(s, j);
            dt.trellis.next[b] = static_cast<std::uint32_t>((s * static_cast<std::size_t>(M)) % S + static_cast<std::size_t>(j));
            for (int m = 0; m < f.sps; ++m) {
                double transient = 0.0;
                for (int i = 1; i <= L - 1; ++i) transient += (past(i) - past(K + i)) * pulse.grid_at(i, m);
                transient -= past(K) * pulse.grid_at(0, m);
                dt.trellis.phase[b * static_cast<std::size_t>(f.sps) + static_cast<std::size_t>(m)] =
                    phi + 2.0 * pih * (a_n * pulse.grid_at(0, m) + transient);
            }
        }
    }
    dt.trellis.finalize_references();
    return dt;
}

double branch_metric(std::span<const cplx> rk_segment, std::span<const double> branch_phase, const CpmFormat& format)
{
    if (rk_segment.size() != static_cast<std::size_t>(format.sps) || branch_phase.size() != static_cast<std::size_t>(format.sps))
        throw InputError("branch_metric: segment and phase must hold sps samples");
    const double c = format.Es / (2.0 * format.Ts);
    double acc = 0.0;
    for (std::size_t m = 0; m < rk_segment.size(); ++m)
        acc += (rk_segment[m] * std::conj(std::polar(c, branch_phase[m]))).real();
    return acc * format.sample_period();
}

DetectionResult viterbi_detect(const BasebandSignal& rk, const DiffTrellis& trellis, const FrameLayout& frame)
{
    const auto& f = trellis.format;
    if (frame.preamble < trellis.memory)
        throw InputError("preamble must hold at least K+L-1 symbols to fix the start state");
    if (frame.postamble < 0 || frame.payload < 1) throw InputError("invalid frame layout");
    if (std::abs(rk.sample_period - f.sample_period()) > 1e-9 * f.sample_period())
        throw InputError("differential signal sample period does not match the format");
    const SectionSource source{&rk, f.Ts, f.sps};
    const double scale = f.Es / (2.0 * f.Ts) * f.sample_period();
    return viterbi_search(trellis.trellis, f, trellis.all_ones_state(), source, frame, scale);
}

}  // namespace cpmdd

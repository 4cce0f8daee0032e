#include "cpmdd/trellis.hpp"

#include <cmath>
#include <limits>

#include "cpmdd/errors.hpp"

namespace cpmdd {

void Trellis::allocate(int alphabet, int samples, std::size_t states)
{
    if (alphabet > 256) throw ConfigError("alphabet sizes above 256 are not supported");
    M = alphabet;
    sps = samples;
    num_states = states;
    next.assign(states * static_cast<std::size_t>(M), 0);
    phase.assign(states * static_cast<std::size_t>(M) * static_cast<std::size_t>(sps), 0.0);
    conj_ref.clear();
}

void Trellis::finalize_references()
{
    conj_ref.resize(phase.size());
    for (std::size_t i = 0; i < phase.size(); ++i) conj_ref[i] = std::polar(1.0, -phase[i]);
}

std::span<const cplx> SectionSource::section(int n) const
{
    const double offset = (n * Ts - signal->start_time) / signal->sample_period;
    const auto first = static_cast<long long>(std::llround(offset));
    if (first < 0 || first + sps > static_cast<long long>(signal->size()))
        throw InputError("observation does not cover section " + std::to_string(n));
    return {signal->samples.data() + first, static_cast<std::size_t>(sps)};
}

DetectionResult viterbi_search(const Trellis& trellis, const CpmFormat& format, std::uint32_t start_state,
                               const SectionSource& source, const FrameLayout& layout, double metric_scale)
{
    constexpr double kNone = -std::numeric_limits<double>::infinity();
    const std::size_t S = trellis.num_states;
    const int M = trellis.M;
    const int sps = trellis.sps;
    const int first = layout.preamble;
    const int sections = layout.total() - first;
    if (sections <= 0) throw InputError("frame has no sections to decode");
    if (start_state >= S) throw InputError("start state out of range");

    // Check coverage up front so a short observation fails before any work.
    (void)source.section(first);
    (void)source.section(layout.total() - 1);

    std::vector<double> metric(S, kNone), fresh(S);
    metric[start_state] = 0.0;
    std::vector<std::uint32_t> pred(static_cast<std::size_t>(sections) * S);
    std::vector<std::uint8_t> input(static_cast<std::size_t>(sections) * S);

    DetectionResult result;
    result.per_section_metrics.reserve(static_cast<std::size_t>(sections));
    const int plus_one = format.symbol_index(+1);

    for (int k = 0; k < sections; ++k) {
        const int n = first + k;
        const auto seg = source.section(n);
        const bool forced = n >= layout.end_payload();
        const int j_lo = forced ? plus_one : 0;
        const int j_hi = forced ? plus_one + 1 : M;
        std::fill(fresh.begin(), fresh.end(), kNone);
        auto* pk = pred.data() + static_cast<std::size_t>(k) * S;
        auto* ik = input.data() + static_cast<std::size_t>(k) * S;

        for (std::size_t s = 0; s < S; ++s) {
            if (metric[s] == kNone) continue;
            for (int j = j_lo; j < j_hi; ++j) {
                const auto ref = trellis.branch_ref(s, j);
                double corr = 0.0;
                for (int m = 0; m < sps; ++m)
                    corr += seg[m].real() * ref[m].real() - seg[m].imag() * ref[m].imag();
                const double cand = metric[s] + corr * metric_scale;
                const auto ns = trellis.next[trellis.branch(s, j)];
                // Strict comparison: on ties the smaller predecessor index survives.
                if (cand > fresh[ns]) {
                    fresh[ns] = cand;
                    pk[ns] = static_cast<std::uint32_t>(s);
                    ik[ns] = static_cast<std::uint8_t>(j);
                }
            }
        }
        metric.swap(fresh);
        double best = kNone;
        for (double v : metric) best = std::max(best, v);
        result.per_section_metrics.push_back(best);
    }

    std::size_t state = 0;
    double best = kNone;
    for (std::size_t s = 0; s < S; ++s)
        if (metric[s] > best) {
            best = metric[s];
            state = s;
        }
    result.final_metric = best;

    std::vector<int> path(static_cast<std::size_t>(sections));
    for (int k = sections - 1; k >= 0; --k) {
        const std::size_t row = static_cast<std::size_t>(k) * S;
        path[static_cast<std::size_t>(k)] = input[row + state];
        state = pred[row + state];
    }
    result.detected.resize(static_cast<std::size_t>(layout.payload));
    for (int i = 0; i < layout.payload; ++i) result.detected[static_cast<std::size_t>(i)] = format.symbol(path[static_cast<std::size_t>(i)]);
    return result;
}

}  // namespace cpmdd

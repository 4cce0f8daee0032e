#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cpmdd/format.hpp"
#include "cpmdd/frame.hpp"
#include "cpmdd/waveform.hpp"

namespace cpmdd {

inline constexpr std::size_t kDefaultStateBudget = std::size_t{1} << 20;

// Shared trellis layout: M branches leave each state, each branch carries
// sps reference phase samples over one symbol interval.
struct Trellis {
    int M = 2;
    int sps = 8;
    std::size_t num_states = 0;
    std::vector<std::uint32_t> next;  // [s*M + j]
    std::vector<double> phase;        // [(s*M + j)*sps + m]
    std::vector<cplx> conj_ref;       // exp(-j phase), same layout

    std::size_t branch(std::size_t s, int j) const { return s * static_cast<std::size_t>(M) + static_cast<std::size_t>(j); }
    std::span<const double> branch_phase(std::size_t s, int j) const
    {
        return {phase.data() + branch(s, j) * sps, static_cast<std::size_t>(sps)};
    }
    std::span<const cplx> branch_ref(std::size_t s, int j) const
    {
        return {conj_ref.data() + branch(s, j) * sps, static_cast<std::size_t>(sps)};
    }

    void allocate(int alphabet, int samples, std::size_t states);
    void finalize_references();  // fills conj_ref from phase
};

struct DetectionResult {
    SymbolSequence detected;                  // payload only
    double final_metric = 0.0;                // Gamma at the last section
    std::vector<double> per_section_metrics;  // best Gamma after each processed section
};

// Observation slices for Viterbi: section n of the frame maps to
// sps samples of `signal`, starting at time n*Ts.
struct SectionSource {
    const BasebandSignal* signal = nullptr;
    double Ts = 1.0;
    int sps = 8;

    std::span<const cplx> section(int n) const;
};

// Maximises the cumulative correlation metric over sections
// [layout.preamble, layout.total()) starting from `start_state`.
// Postamble sections only follow the +1 branch. `metric_scale` multiplies
// every branch correlation (reference amplitude times sample period).
DetectionResult viterbi_search(const Trellis& trellis, const CpmFormat& format, std::uint32_t start_state,
                               const SectionSource& source, const FrameLayout& layout, double metric_scale);

}  // namespace cpmdd

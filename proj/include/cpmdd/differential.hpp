#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cpmdd/format.hpp"
#include "cpmdd/frame.hpp"
#include "cpmdd/trellis.hpp"
#include "cpmdd/waveform.hpp"

namespace cpmdd {

// R_K(t) = r(t) conj(r(t - K Ts)) / 2, starting K symbol periods after r.
BasebandSignal differential_preprocess(const BasebandSignal& r, int K, const CpmFormat& format);

// State = the last K+L-1 symbols [a_{n-K-L+1}, ..., a_{n-1}], mixed-radix
// encoded with the most recent symbol in the lowest digit.
struct DiffState {
    std::vector<int> history;  // oldest first
    std::uint32_t index = 0;
};

struct DiffTrellis {
    CpmFormat format;
    int K = 1;
    int memory = 1;  // K + L - 1
    Trellis trellis;

    std::size_t num_states() const { return trellis.num_states; }
    DiffState state(std::uint32_t index) const;
    std::uint32_t state_index(std::span<const int> history) const;
    std::uint32_t all_ones_state() const;
};

// Branch reference phases Theta_K over one interval: a constant part
// pi*h*sum_{i<K} a_{n-L-i} (reduced mod 2 pi) plus the pulse transients of
// the last L symbols of both the signal and its delayed copy.
DiffTrellis build_diff_trellis(const CpmFormat& format, int K, std::size_t state_budget = kDefaultStateBudget);

// Re[ sum_m Rk[m] conj((Es/(2Ts)) exp(j phase[m])) ] * sample_period.
double branch_metric(std::span<const cplx> rk_segment, std::span<const double> branch_phase, const CpmFormat& format);

DetectionResult viterbi_detect(const BasebandSignal& rk, const DiffTrellis& trellis, const FrameLayout& frame);

}  // namespace cpmdd

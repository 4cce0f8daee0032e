#pragma once

#include <cstdint>
#include <vector>

#include "cpmdd/format.hpp"
#include "cpmdd/frame.hpp"
#include "cpmdd/trellis.hpp"
#include "cpmdd/waveform.hpp"

namespace cpmdd {

// Coherent CPM trellis: cumulative phase kept as an exact integer residue r
// (phase = pi*r/den, r in [0, 2*den)), times the last L-1 symbols.
// State index = residue_slot * M^(L-1) + correlative index.
struct CoherentTrellis {
    CpmFormat format;
    std::vector<int> residues;    // reachable residues, ascending
    std::vector<int> residue_slot;  // residue -> slot, -1 if unreachable
    std::size_t correlative_states = 1;
    Trellis trellis;

    std::size_t num_states() const { return trellis.num_states; }
    std::size_t num_phase_states() const { return residues.size(); }
    // State after `preamble` +1 symbols sent from phase zero.
    std::uint32_t preamble_state(int preamble) const;
    // Integer residue of the cumulative phase for a state.
    int residue_of(std::uint32_t state) const;
};

CoherentTrellis build_coherent_trellis(const CpmFormat& format, std::size_t state_budget = kDefaultStateBudget);

// ML payload with perfect phase knowledge (psi = 0, no frequency offset).
DetectionResult coherent_detect(const BasebandSignal& r, const CoherentTrellis& trellis, const FrameLayout& frame);

}  // namespace cpmdd

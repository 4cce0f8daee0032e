#pragma once

#include <span>

#include "cpmdd/format.hpp"

namespace cpmdd {

// Known +1 preamble, unknown payload, known +1 postamble.
struct FrameLayout {
    int preamble = 0;
    int payload = 0;
    int postamble = 0;

    int total() const { return preamble + payload + postamble; }
    int first_payload() const { return preamble; }
    int end_payload() const { return preamble + payload; }

    // Guard length K+L-1 on both sides, enough to pin the differential
    // trellis state at the first payload section.
    static FrameLayout for_delay(const CpmFormat& format, int K, int payload);
};

SymbolSequence assemble_frame(const CpmFormat& format, const FrameLayout& layout, std::span<const int> payload);

// Gray labels: adjacent alphabet symbols differ in a single bit.
unsigned gray_label(int symbol_index);
int gray_symbol_index(unsigned label);

// Bit errors between two symbol sequences under Gray mapping.
long long count_bit_errors(const CpmFormat& format, std::span<const int> tx, std::span<const int> rx);

}  // namespace cpmdd

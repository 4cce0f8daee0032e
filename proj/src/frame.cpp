#include "cpmdd/frame.hpp"

#include <bit>

#include "cpmdd/errors.hpp"

namespace cpmdd {

FrameLayout FrameLayout::for_delay(const CpmFormat& format, int K, int payload)
{
    if (K < 1) throw ConfigError("delay K must be >= 1");
    if (payload < 1) throw ConfigError("payload length must be >= 1");
    const int guard = K + format.L - 1;
    return FrameLayout{guard, payload, guard};
}

SymbolSequence assemble_frame(const CpmFormat& format, const FrameLayout& layout, std::span<const int> payload)
{
    if (static_cast<int>(payload.size()) != layout.payload)
        throw InputError("payload length " + std::to_string(payload.size()) + " does not match frame layout " +
                         std::to_string(layout.payload));
    check_symbols(format, SymbolSequence(payload.begin(), payload.end()));
    SymbolSequence frame(static_cast<std::size_t>(layout.total()), +1);
    std::copy(payload.begin(), payload.end(), frame.begin() + layout.preamble);
    return frame;
}

unsigned gray_label(int symbol_index)
{
    const auto j = static_cast<unsigned>(symbol_index);
    return j ^ (j >> 1);
}

int gray_symbol_index(unsigned label)
{
    unsigned j = label;
    for (unsigned shift = label >> 1; shift != 0; shift >>= 1) j ^= shift;
    return static_cast<int>(j);
}

long long count_bit_errors(const CpmFormat& format, std::span<const int> tx, std::span<const int> rx)
{
    if (tx.size() != rx.size()) throw InputError("count_bit_errors: length mismatch");
    long long errors = 0;
    for (std::size_t i = 0; i < tx.size(); ++i) {
        const unsigned diff = gray_label(format.symbol_index(tx[i])) ^ gray_label(format.symbol_index(rx[i]));
        errors += std::popcount(diff);
    }
    return errors;
}

}  // namespace cpmdd

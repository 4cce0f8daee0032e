#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cpmdd {

enum class PulseFamily { Rec, Rc, Gaussian };

std::string to_string(PulseFamily p);
PulseFamily parse_pulse_family(const std::string& s);

// Modulation index as a reduced fraction num/den.
struct ModIndex {
    int num = 1;
    int den = 2;

    double value() const { return static_cast<double>(num) / den; }
    static ModIndex parse(const std::string& s);  // "num/den"
    std::string to_string() const;
};

// A CPM format. Times in seconds, energies in joules.
struct CpmFormat {
    int M = 2;
    ModIndex h{1, 2};
    PulseFamily pulse = PulseFamily::Rec;
    int L = 1;
    double bt = 0.3;  // Gaussian only
    double Ts = 1e-4;
    int sps = 8;
    double Es = 1e-4;  // Es = Ts gives unit amplitude

    // Throws ConfigError when any invariant is violated. Also reduces h.
    void validate();
    CpmFormat validated() const {
        CpmFormat f = *this;
        f.validate();
        return f;
    }

    double amplitude() const;  // sqrt(Es/Ts)
    double sample_period() const { return Ts / sps; }
    int bits_per_symbol() const;  // log2(M), M must be a power of two for bit mapping
    double log2M() const;

    // Alphabet {-(M-1), ..., -1, +1, ..., M-1}, index j maps to 2j-(M-1).
    int symbol(int index) const { return 2 * index - (M - 1); }
    int symbol_index(int a) const { return (a + M - 1) / 2; }
    bool is_symbol(int a) const;
    std::vector<int> alphabet() const;

    std::string describe() const;  // e.g. "3REC h=3/4 M=2"
};

// Information symbols, each an odd integer with |a| <= M-1.
using SymbolSequence = std::vector<int>;

void check_symbols(const CpmFormat& format, const SymbolSequence& a);

}  // namespace cpmdd

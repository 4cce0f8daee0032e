#include "cpmdd/coherent.hpp"

#include <cmath>
#include <numbers>

#include "cpmdd/errors.hpp"

namespace cpmdd {

namespace {

int mod(long long x, int m)
{
    const long long r = x % m;
    return static_cast<int>(r < 0 ? r + m : r);
}

}  // namespace

std::uint32_t CoherentTrellis::preamble_state(int preamble) const
{
    const int L = format.L;
    if (preamble < L - 1) throw InputError("coherent detection needs a preamble of at least L-1 symbols");
    // Symbols 0 .. preamble-L are saturated, the last L-1 form the correlative state.
    const int residue = mod(static_cast<long long>(format.h.num) * (preamble - L + 1), 2 * format.h.den);
    std::size_t corr = 0;
    const auto plus = static_cast<std::size_t>(format.symbol_index(+1));
    for (int i = 0; i < L - 1; ++i) corr = corr * static_cast<std::size_t>(format.M) + plus;
    const int slot = residue_slot[static_cast<std::size_t>(residue)];
    if (slot < 0) throw InputError("preamble phase is not a reachable residue");
    return static_cast<std::uint32_t>(static_cast<std::size_t>(slot) * correlative_states + corr);
}

int CoherentTrellis::residue_of(std::uint32_t state) const
{
    return residues[state / correlative_states];
}

CoherentTrellis build_coherent_trellis(const CpmFormat& fmt, std::size_t state_budget)
{
    CoherentTrellis ct;
    ct.format = fmt.validated();
    const auto& f = ct.format;
    const int M = f.M;
    const int L = f.L;
    const int two_den = 2 * f.h.den;

    // Residues reachable from 0 in steps of h_num * a.
    std::vector<char> seen(static_cast<std::size_t>(two_den), 0);
    std::vector<int> queue{0};
    seen[0] = 1;
    for (std::size_t qi = 0; qi < queue.size(); ++qi)
        for (int a : f.alphabet()) {
            const int r = mod(queue[qi] + static_cast<long long>(f.h.num) * a, two_den);
            if (!seen[static_cast<std::size_t>(r)]) {
                seen[static_cast<std::size_t>(r)] = 1;
                queue.push_back(r);
            }
        }
    ct.residue_slot.assign(static_cast<std::size_t>(two_den), -1);
    for (int r = 0; r < two_den; ++r)
        if (seen[static_cast<std::size_t>(r)]) {
            ct.residue_slot[static_cast<std::size_t>(r)] = static_cast<int>(ct.residues.size());
            ct.residues.push_back(r);
        }

    ct.correlative_states = 1;
    for (int i = 0; i < L - 1; ++i) ct.correlative_states *= static_cast<std::size_t>(M);
    const std::size_t S = ct.residues.size() * ct.correlative_states;
    if (S > state_budget)
        throw CapacityError("coherent trellis needs " + std::to_string(S) + " states, budget is " +
                                std::to_string(state_budget),
                            S);
    ct.trellis.allocate(M, f.sps, S);

    const PulseShape pulse(f);
    const double pih = std::numbers::pi * f.h.value();
    std::vector<int> recent(static_cast<std::size_t>(L));  // recent[i] = a_{n-i}
    for (std::size_t s = 0; s < S; ++s) {
        const int residue = ct.residues[s / ct.correlative_states];
        std::size_t corr = s % ct.correlative_states;
        {
            std::size_t rest = corr;
            for (int i = 1; i < L; ++i) {
                recent[static_cast<std::size_t>(i)] = f.symbol(static_cast<int>(rest % static_cast<std::size_t>(M)));
                rest /= static_cast<std::size_t>(M);
            }
        }
        for (int j = 0; j < M; ++j) {
            recent[0] = f.symbol(j);
            const std::size_t b = ct.trellis.branch(s, j);
            for (int m = 0; m < f.sps; ++m) {
                double active = 0.0;
                for (int i = 0; i < L; ++i) active += recent[static_cast<std::size_t>(i)] * pulse.grid_at(i, m);
                ct.trellis.phase[b * static_cast<std::size_t>(f.sps) + static_cast<std::size_t>(m)] =
                    std::numbers::pi * residue / f.h.den + 2.0 * pih * active;
            }
            // a_{n-L+1} saturates at the end of this interval.
            const int oldest = recent[static_cast<std::size_t>(L - 1)];
            const int next_residue = mod(residue + static_cast<long long>(f.h.num) * oldest, two_den);
            const std::size_t next_corr =
                ct.correlative_states == 1 ? 0 : (corr * static_cast<std::size_t>(M) + static_cast<std::size_t>(j)) % ct.correlative_states;
            ct.trellis.next[b] = static_cast<std::uint32_t>(
                static_cast<std::size_t>(ct.residue_slot[static_cast<std::size_t>(next_residue)]) * ct.correlative_states + next_corr);
        }
    }
    ct.trellis.finalize_references();
    return ct;
}

DetectionResult coherent_detect(const BasebandSignal& r, const CoherentTrellis& trellis, const FrameLayout& frame)
{
    const auto& f = trellis.format;
    if (frame.payload < 1 || frame.postamble < 0) throw InputError("invalid frame layout");
    if (std::abs(r.sample_period - f.sample_period()) > 1e-9 * f.sample_period())
        throw InputError("received signal sample period does not match the format");
    const SectionSource source{&r, f.Ts, f.sps};
    const double scale = f.amplitude() * f.sample_period();
    return viterbi_search(trellis.trellis, f, trellis.preamble_state(frame.preamble), source, frame, scale);
}

}  // namespace cpmdd

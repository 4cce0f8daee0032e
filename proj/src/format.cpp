#include "cpmdd/format.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "cpmdd/errors.hpp"

namespace cpmdd {

std::string to_string(PulseFamily p)
{
    switch (p) {
    case PulseFamily::Rec: return "rec";
    case PulseFamily::Rc: return "rc";
    case PulseFamily::Gaussian: return "gauss";
    }
    return "?";
}

PulseFamily parse_pulse_family(const std::string& s)
{
    if (s == "rec" || s == "REC") return PulseFamily::Rec;
    if (s == "rc" || s == "RC") return PulseFamily::Rc;
    if (s == "gauss" || s == "gaussian" || s == "GAUSSIAN" || s == "gfsk") return PulseFamily::Gaussian;
    throw ConfigError("unknown pulse family '" + s + "' (expected rec, rc or gauss)");
}

ModIndex ModIndex::parse(const std::string& s)
{
    ModIndex h;
    auto slash = s.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            h.num = std::stoi(s, &used);
            h.den = 1;
            if (used != s.size()) throw ConfigError("");
        } else {
            h.num = std::stoi(s.substr(0, slash), &used);
            if (used != slash) throw ConfigError("");
            auto rest = s.substr(slash + 1);
            h.den = std::stoi(rest, &used);
            if (used != rest.size()) throw ConfigError("");
        }
    } catch (const std::exception&) {
        throw ConfigError("modulation index '" + s + "' is not of the form num/den");
    }
    return h;
}

std::string ModIndex::to_string() const
{
    return std::to_string(num) + "/" + std::to_string(den);
}

void CpmFormat::validate()
{
    if (M < 2 || M % 2 != 0)
        throw ConfigError("alphabet size M must be an even integer >= 2, got " + std::to_string(M));
    if (h.den <= 0 || h.num <= 0)
        throw ConfigError("modulation index must be a positive fraction, got " + h.to_string());
    const int g = std::gcd(h.num, h.den);
    h.num /= g;
    h.den /= g;
    if (h.num >= 2 * h.den)
        throw ConfigError("modulation index must satisfy 0 < h < 2, got " + h.to_string());
    if (L < 1) throw ConfigError("pulse length L must be >= 1");
    if (pulse == PulseFamily::Gaussian && !(bt > 0.0))
        throw ConfigError("Gaussian pulse needs bt > 0");
    if (!(Ts > 0.0)) throw ConfigError("symbol period Ts must be > 0");
    if (sps < 4) throw ConfigError("samples per symbol must be >= 4, got " + std::to_string(sps));
    if (!(Es > 0.0)) throw ConfigError("symbol energy Es must be > 0");
}

double CpmFormat::amplitude() const { return std::sqrt(Es / Ts); }

double CpmFormat::log2M() const { return std::log2(static_cast<double>(M)); }

int CpmFormat::bits_per_symbol() const
{
    int bits = 0;
    while ((1 << bits) < M) ++bits;
    if ((1 << bits) != M)
        throw ConfigError("bit mapping needs M to be a power of two, got " + std::to_string(M));
    return bits;
}

bool CpmFormat::is_symbol(int a) const
{
    return (a % 2 != 0) && a >= -(M - 1) && a <= M - 1;
}

std::vector<int> CpmFormat::alphabet() const
{
    std::vector<int> out(M);
    for (int j = 0; j < M; ++j) out[j] = symbol(j);
    return out;
}

std::string CpmFormat::describe() const
{
    std::ostringstream os;
    os << L;
    switch (pulse) {
    case PulseFamily::Rec: os << "REC"; break;
    case PulseFamily::Rc: os << "RC"; break;
    case PulseFamily::Gaussian: os << "GAUSS(BT=" << bt << ")"; break;
    }
    os << " h=" << h.to_string() << " M=" << M;
    return os.str();
}

void check_symbols(const CpmFormat& format, const SymbolSequence& a)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!format.is_symbol(a[i]))
            throw InputError("symbol " + std::to_string(a[i]) + " at position " + std::to_string(i) +
                             " is not in the " + std::to_string(format.M) + "-ary alphabet");
}

}  // namespace cpmdd

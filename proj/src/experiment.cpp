#include "cpmdd/experiment.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <thread>

#include "cpmdd/channel.hpp"
#include "cpmdd/coherent.hpp"
#include "cpmdd/differential.hpp"
#include "cpmdd/errors.hpp"
#include "cpmdd/frame.hpp"
#include "cpmdd/waveform.hpp"

namespace cpmdd {

std::string to_string(DetectorKind d) { return d == DetectorKind::Differential ? "diff" : "coherent"; }

DetectorKind parse_detector(const std::string& s)
{
    if (s == "diff" || s == "differential") return DetectorKind::Differential;
    if (s == "coherent") return DetectorKind::Coherent;
    throw ConfigError("unknown detector '" + s + "' (expected diff or coherent)");
}

PhaseMode PhaseMode::parse(const std::string& s)
{
    if (s == "random") return PhaseMode{true, 0.0};
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return PhaseMode{false, v};
    } catch (const std::exception&) {
    }
    throw ConfigError("phase must be 'random' or a value in radians, got '" + s + "'");
}

void ExperimentConfig::validate()
{
    format.validate();
    (void)format.bits_per_symbol();
    if (K < 1) throw ConfigError("K must be >= 1");
    if (ebn0_grid.empty()) throw ConfigError("Eb/N0 grid is empty");
    if (payload_len < 1) throw ConfigError("payload length must be >= 1");
    if (max_frames < 1) throw ConfigError("max_frames must be >= 1");
    if (target_errors < 1) throw ConfigError("target_errors must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (batch < 1) throw ConfigError("batch must be >= 1");
}

std::vector<double> parse_ebn0_grid(const std::string& s)
{
    auto number = [&](const std::string& part) {
        try {
            std::size_t used = 0;
            const double v = std::stod(part, &used);
            if (used == part.size()) return v;
        } catch (const std::exception&) {
        }
        throw ConfigError("bad Eb/N0 value '" + part + "' in '" + s + "'");
    };
    const auto c1 = s.find(':');
    if (c1 == std::string::npos) return {number(s)};
    const auto c2 = s.find(':', c1 + 1);
    if (c2 == std::string::npos) throw ConfigError("Eb/N0 grid must be start:step:stop, got '" + s + "'");
    const double start = number(s.substr(0, c1));
    const double step = number(s.substr(c1 + 1, c2 - c1 - 1));
    const double stop = number(s.substr(c2 + 1));
    if (!(step > 0.0) || stop < start) throw ConfigError("Eb/N0 grid needs step > 0 and stop >= start: '" + s + "'");
    std::vector<double> grid;
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9));
    for (long long i = 0; i <= count; ++i) grid.push_back(start + static_cast<double>(i) * step);
    return grid;
}

bool is_low_confidence(long long errors, long long bits)
{
    if (errors <= 0 || bits <= 0) return true;
    const double p = static_cast<double>(errors) / static_cast<double>(bits);
    const double half_width = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(bits));
    return half_width > 0.5 * p;
}

namespace {

class FrameSimulator {
public:
    explicit FrameSimulator(const ExperimentConfig& cfg)
        : cfg_(cfg), pulse_(cfg.format), layout_(FrameLayout::for_delay(cfg.format, cfg.K, cfg.payload_len))
    {
        if (cfg_.detector == DetectorKind::Differential)
            diff_.emplace(build_diff_trellis(cfg_.format, cfg_.K));
        else
            coherent_.emplace(build_coherent_trellis(cfg_.format));
    }

    long long errors(int ebn0_index, long long frame_index) const
    {
        const auto& f = pulse_.format();
        const std::uint64_t seed = derive_seed(cfg_.master_seed, static_cast<std::uint64_t>(ebn0_index),
                                               static_cast<std::uint64_t>(frame_index));
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> pick(0, f.M - 1);
        SymbolSequence payload(static_cast<std::size_t>(layout_.payload));
        for (auto& a : payload) a = f.symbol(pick(rng));
        std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
        const double drawn = angle(rng);

        ChannelParams ch;
        ch.psi = cfg_.phase.random ? drawn : cfg_.phase.value;
        ch.fd = cfg_.fd;
        ch.N0 = noise_level_from_ebn0(f, cfg_.ebn0_grid[static_cast<std::size_t>(ebn0_index)]);
        ch.seed = derive_seed(seed, 1);

        const auto frame = assemble_frame(f, layout_, payload);
        auto r = apply_channel(modulate(pulse_, frame), ch);
        DetectionResult det;
        if (diff_) {
            det = viterbi_detect(differential_preprocess(r, cfg_.K, f), *diff_, layout_);
        } else {
            // Genie carrier phase; a frequency offset is left uncompensated.
            const cplx derotate = std::polar(1.0, -ch.psi);
            for (auto& x : r.samples) x *= derotate;
            det = coherent_detect(r, *coherent_, layout_);
        }
        return count_bit_errors(f, payload, det.detected);
    }

    const FrameLayout& layout() const { return layout_; }

private:
    ExperimentConfig cfg_;
    PulseShape pulse_;
    FrameLayout layout_;
    std::optional<DiffTrellis> diff_;
    std::optional<CoherentTrellis> coherent_;
};

std::vector<BerPoint> run_ber_labelled(const ExperimentConfig& config, const std::string& label)
{
    ExperimentConfig cfg = config;
    cfg.validate();
    const FrameSimulator sim(cfg);
    const long long bits_per_frame = static_cast<long long>(cfg.payload_len) * cfg.format.bits_per_symbol();

    std::vector<BerPoint> out;
    for (std::size_t i = 0; i < cfg.ebn0_grid.size(); ++i) {
        BerPoint pt;
        pt.ebn0_db = cfg.ebn0_grid[i];
        pt.detector = label;
        pt.K = cfg.detector == DetectorKind::Differential ? cfg.K : 0;
        pt.seed = derive_seed(cfg.master_seed, i, 0);
        long long frames = 0;
        long long errors = 0;
        while (errors < cfg.target_errors && frames < cfg.max_frames) {
            const long long count = std::min<long long>(cfg.batch, cfg.max_frames - frames);
            const int workers = static_cast<int>(std::min<long long>(cfg.workers, count));
            std::vector<long long> partial(static_cast<std::size_t>(workers), 0);
            auto work = [&](int w) {
                for (long long f = w; f < count; f += workers)
                    partial[static_cast<std::size_t>(w)] += sim.errors(static_cast<int>(i), frames + f);
            };
            if (workers == 1) {
                work(0);
            } else {
                std::vector<std::jthread> pool;
                for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
            }
            for (long long e : partial) errors += e;
            frames += count;
        }
        pt.frames = frames;
        pt.errors = errors;
        pt.bits = frames * bits_per_frame;
        pt.ber = static_cast<double>(errors) / static_cast<double>(pt.bits);
        pt.low_confidence = is_low_confidence(errors, pt.bits);
        out.push_back(pt);
    }
    return out;
}

}  // namespace

std::vector<BerPoint> run_ber(const ExperimentConfig& config)
{
    return run_ber_labelled(config, to_string(config.detector));
}

long long simulate_frame(const ExperimentConfig& config, int ebn0_index, long long frame_index)
{
    ExperimentConfig cfg = config;
    cfg.validate();
    if (ebn0_index < 0 || ebn0_index >= static_cast<int>(cfg.ebn0_grid.size()))
        throw InputError("Eb/N0 index out of range");
    return FrameSimulator(cfg).errors(ebn0_index, frame_index);
}

std::vector<DistanceReport> run_dmin_sweep(const CpmFormat& format, int k_first, int k_last, int depth, int n_obs)
{
    if (k_first < 1 || k_last < k_first) throw ConfigError("delay range must satisfy 1 <= first <= last");
    std::vector<DistanceReport> out;
    for (int K = k_first; K <= k_last; ++K) out.push_back(dmin(format, K, depth, n_obs));
    return out;
}

std::vector<BerPoint> DopplerComparison::all() const
{
    std::vector<BerPoint> out;
    for (const auto* v : {&diff, &diff_doppler, &coherent, &coherent_doppler}) out.insert(out.end(), v->begin(), v->end());
    return out;
}

DopplerComparison run_doppler_compare(const ExperimentConfig& config)
{
    DopplerComparison out;
    ExperimentConfig cfg = config;
    cfg.detector = DetectorKind::Differential;
    cfg.fd = 0.0;
    out.diff = run_ber_labelled(cfg, "diff");
    cfg.fd = config.fd;
    out.diff_doppler = run_ber_labelled(cfg, "diff_doppler");
    cfg.detector = DetectorKind::Coherent;
    cfg.fd = 0.0;
    out.coherent = run_ber_labelled(cfg, "coherent");
    cfg.fd = config.fd;
    out.coherent_doppler = run_ber_labelled(cfg, "coherent_doppler");
    return out;
}

double ebn0_at_ber(const std::vector<BerPoint>& curve, double target)
{
    const double lt = std::log10(target);
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const auto& a = curve[i];
        const auto& b = curve[i + 1];
        if (a.ber >= target && b.ber < target) {
            if (b.ber <= 0.0) return b.ebn0_db;
            const double la = std::log10(a.ber);
            const double lb = std::log10(b.ber);
            return a.ebn0_db + (lt - la) / (lb - la) * (b.ebn0_db - a.ebn0_db);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace cpmdd

// Acceptance gate. Prints one PASS/FAIL line per criterion (details indented
// underneath) and exits non-zero when any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "cpmdd/channel.hpp"
#include "cpmdd/coherent.hpp"
#include "cpmdd/differential.hpp"
#include "cpmdd/distance.hpp"
#include "cpmdd/experiment.hpp"
#include "cpmdd/report.hpp"
#include "oracles.hpp"

using namespace cpmdd;
namespace fs = std::filesystem;

namespace tol {
// 1: exact K match, per-cell wall clock
constexpr double kCellSeconds = 300.0;
// 2: BER curves of 3REC h=3/4
constexpr double kTargetBer = 1e-3;
constexpr double kGapK1Db = 3.0;
constexpr double kGapK1TolDb = 0.7;
constexpr double kGapK2Db = 1.0;
constexpr double kGapK2TolDb = 0.5;
constexpr double kK4NoBetterSlackDb = 0.0;
constexpr double kFig1Minutes = 30.0;
constexpr long long kMinErrors = 200;
// 3: coherent-to-optimised gap for 5RC
constexpr double kCoherentGapDb = 2.5;
// 4: Doppler
constexpr double kFdTs = 0.01;
constexpr double kSigmas = 3.0;
constexpr double kCoherentDegradation = 10.0;
constexpr double kMidSnrDb = 10.0;
// 5: oracle equivalence
constexpr int kOracleFrames = 200;
constexpr int kOracleMaxPayload = 8;
// 6: numerical invariants
constexpr double kEnvelopeRel = 1e-12;
constexpr double kPulse = 1e-9;
constexpr double kDecomposition = 1e-9;
constexpr double kNormalisationRel = 1e-6;
constexpr double kFactorisationRel = 1e-12;
}  // namespace tol

namespace {

int failures = 0;

void verdict(int id, bool ok, const std::string& what)
{
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << id << ": " << what << std::endl;
    if (!ok) ++failures;
}

void detail(const std::string& s) { std::cout << "      " << s << std::endl; }

std::string fmt(double v, int prec = 4)
{
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

CpmFormat make(PulseFamily p, int L, ModIndex h, double bt = 0.3)
{
    CpmFormat f;
    f.pulse = p;
    f.L = L;
    f.h = h;
    f.bt = bt;
    return f.validated();
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig ber_config(const CpmFormat& f, DetectorKind det, int K, std::vector<double> grid, long long max_frames,
                            std::uint64_t seed)
{
    ExperimentConfig cfg;
    cfg.format = f;
    cfg.detector = det;
    cfg.K = K;
    cfg.ebn0_grid = std::move(grid);
    cfg.payload_len = 120;
    cfg.target_errors = tol::kMinErrors;
    cfg.max_frames = max_frames;
    cfg.master_seed = seed;
    return cfg;
}

std::vector<double> grid(double a, double step, double b)
{
    std::vector<double> g;
    for (double x = a; x <= b + 1e-9; x += step) g.push_back(x);
    return g;
}

std::string curve_text(const std::vector<BerPoint>& c)
{
    std::string s;
    for (const auto& p : c) s += fmt(p.ebn0_db, 3) + ":" + fmt(p.ber, 3) + " ";
    return s;
}

// ---------------------------------------------------------------------------

void criterion_1()
{
    struct Cell {
        PulseFamily p;
        int L;
        ModIndex h;
        int want;
    };
    const std::vector<Cell> cells{{PulseFamily::Rc, 1, {1, 2}, 2},       {PulseFamily::Rc, 3, {1, 2}, 3},
                                  {PulseFamily::Rc, 5, {3, 4}, 4},       {PulseFamily::Rec, 1, {1, 3}, 2},
                                  {PulseFamily::Rec, 3, {3, 4}, 3},      {PulseFamily::Rec, 5, {1, 2}, 5},
                                  {PulseFamily::Gaussian, 3, {1, 2}, 3}, {PulseFamily::Gaussian, 5, {3, 4}, 4}};
    int matched = 0;
    bool in_time = true;
    for (const auto& c : cells) {
        const auto f = make(c.p, c.L, c.h);
        const auto t0 = std::chrono::steady_clock::now();
        const auto choice = optimize_delay(f, 6);
        const double sec = seconds_since(t0);
        in_time = in_time && sec < tol::kCellSeconds;
        std::string d2;
        for (const auto& r : choice.reports) d2 += fmt(r.d2_min, 5) + " ";
        const bool ok = choice.K == c.want;
        matched += ok;
        detail(f.describe() + ": K*=" + std::to_string(choice.K) + " expected " + std::to_string(c.want) + (ok ? "" : "  MISMATCH") +
               "  d2(K=1..6)= " + d2 + " (" + fmt(sec, 3) + " s)");
    }
    verdict(1, matched == static_cast<int>(cells.size()) && in_time,
            "optimized-delay cells reproduced " + std::to_string(matched) + "/" + std::to_string(cells.size()) +
                (in_time ? "" : ", runtime budget exceeded"));
}

void criterion_2()
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto f = make(PulseFamily::Rec, 3, {3, 4});
    const std::vector<std::vector<double>> grids{grid(9, 0.5, 13), grid(7, 0.5, 11), grid(6, 0.5, 10), grid(6, 0.5, 10)};
    std::vector<double> cross(4);
    std::vector<double> at10(4);
    bool enough_errors = true;
    for (int K = 1; K <= 4; ++K) {
        const auto curve = run_ber(ber_config(f, DetectorKind::Differential, K, grids[static_cast<std::size_t>(K - 1)], 2'000'000, 100 + K));
        cross[static_cast<std::size_t>(K - 1)] = ebn0_at_ber(curve, tol::kTargetBer);
        for (const auto& p : curve) {
            enough_errors = enough_errors && p.errors >= tol::kMinErrors;
            if (std::abs(p.ebn0_db - 10.0) < 1e-9) at10[static_cast<std::size_t>(K - 1)] = p.ber;
        }
        detail("K=" + std::to_string(K) + " crosses 1e-3 at " + fmt(cross[static_cast<std::size_t>(K - 1)]) + " dB; " + curve_text(curve));
    }
    const double gap1 = cross[0] - cross[2];
    const double gap2 = cross[1] - cross[2];
    const double k4 = cross[3] - cross[2];
    const bool ok1 = std::abs(gap1 - tol::kGapK1Db) <= tol::kGapK1TolDb;
    const bool ok2 = std::abs(gap2 - tol::kGapK2Db) <= tol::kGapK2TolDb;
    const bool ok4 = k4 >= -tol::kK4NoBetterSlackDb;
    const double minutes = seconds_since(t0) / 60.0;
    detail("K3 vs K1 gap " + fmt(gap1) + " dB (3 +- 0.7): " + (ok1 ? "ok" : "out of range"));
    detail("K3 vs K2 gap " + fmt(gap2) + " dB (1 +- 0.5): " + (ok2 ? "ok" : "out of range"));
    detail("K4 minus K3 " + fmt(k4) + " dB (K=4 must be no better): " + (ok4 ? "ok" : "K=4 is better"));
    detail("BER at 10 dB for K=1..4: " + fmt(at10[0], 3) + " " + fmt(at10[1], 3) + " " + fmt(at10[2], 3) + " " + fmt(at10[3], 3) +
           " (distance ranking predicts K4 < K3 < K2 < K1)");
    detail("elapsed " + fmt(minutes, 3) + " min, every point >= 200 errors: " + (enough_errors ? "yes" : "no"));
    verdict(2, ok1 && ok2 && ok4 && enough_errors && minutes <= tol::kFig1Minutes,
            "3REC h=3/4 delay gaps at BER 1e-3 (K3-K1 " + fmt(gap1, 3) + " dB, K3-K2 " + fmt(gap2, 3) + " dB, K4-K3 " + fmt(k4, 3) + " dB)");
}

void criterion_3()
{
    bool ordered = true;
    double gap5rc = std::nan("");
    struct Case {
        std::string name;
        CpmFormat f;
    };
    for (const auto& c : {Case{"GMSK BT=0.3", make(PulseFamily::Gaussian, 3, {1, 2})}, Case{"5RC h=1/2", make(PulseFamily::Rc, 5, {1, 2})}}) {
        const int kopt = optimize_delay(c.f, 6).K;
        const auto g = grid(2, 1, 12);
        const auto coh = run_ber(ber_config(c.f, DetectorKind::Coherent, 1, g, 20000, 300));
        const auto opt = run_ber(ber_config(c.f, DetectorKind::Differential, kopt, g, 20000, 300));
        const auto one = run_ber(ber_config(c.f, DetectorKind::Differential, 1, g, 20000, 300));
        bool case_ordered = true;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const bool ok = coh[i].ber <= opt[i].ber && opt[i].ber <= one[i].ber;
            if (!ok) detail(c.name + ": ordering broken at " + fmt(g[i]) + " dB");
            case_ordered = case_ordered && ok;
        }
        ordered = ordered && case_ordered;
        const double xc = ebn0_at_ber(coh, tol::kTargetBer);
        const double xo = ebn0_at_ber(opt, tol::kTargetBer);
        const double x1 = ebn0_at_ber(one, tol::kTargetBer);
        detail(c.name + ": optimized K=" + std::to_string(kopt) + ", 1e-3 crossings coherent " + fmt(xc) + " dB, K*=" + fmt(xo) +
               " dB, K=1 " + fmt(x1) + " dB, ordering " + (case_ordered ? "holds" : "broken"));
        detail("  coherent " + curve_text(coh));
        detail("  K*       " + curve_text(opt));
        detail("  K=1      " + curve_text(one));
        if (c.f.pulse == PulseFamily::Rc) gap5rc = xo - xc;
    }
    const bool gap_ok = gap5rc <= tol::kCoherentGapDb;
    verdict(3, ordered && gap_ok,
            "coherent <= optimized differential <= K=1 at every point; 5RC coherent gap " + fmt(gap5rc, 3) + " dB (<= 2.5)");
}

void criterion_4()
{
    const auto f = make(PulseFamily::Rec, 5, {1, 2});
    const int kopt = optimize_delay(f, 6).K;
    auto cfg = ber_config(f, DetectorKind::Differential, kopt, grid(4, 2, 14), 20000, 400);
    cfg.fd = tol::kFdTs / f.Ts;
    const auto cmp = run_doppler_compare(cfg);
    bool diff_ok = true;
    for (std::size_t i = 0; i < cmp.diff.size(); ++i) {
        const auto& a = cmp.diff[i];
        const auto& b = cmp.diff_doppler[i];
        const double sigma = std::sqrt(a.ber * (1 - a.ber) / static_cast<double>(a.bits) + b.ber * (1 - b.ber) / static_cast<double>(b.bits));
        const bool ok = std::abs(a.ber - b.ber) <= tol::kSigmas * sigma;
        diff_ok = diff_ok && ok;
        detail(fmt(a.ebn0_db) + " dB: diff " + fmt(a.ber, 3) + " vs diff_doppler " + fmt(b.ber, 3) + " (|d|/sigma = " +
               fmt(std::abs(a.ber - b.ber) / sigma, 3) + "); coherent " + fmt(cmp.coherent[i].ber, 3) + " vs coherent_doppler " +
               fmt(cmp.coherent_doppler[i].ber, 3));
    }
    double ratio = 0.0;
    for (std::size_t i = 0; i < cmp.coherent.size(); ++i)
        if (std::abs(cmp.coherent[i].ebn0_db - tol::kMidSnrDb) < 1e-9)
            ratio = cmp.coherent_doppler[i].ber / std::max(cmp.coherent[i].ber, 1e-300);
    const bool coh_ok = ratio >= tol::kCoherentDegradation;
    detail("differential K=" + std::to_string(kopt) + ", fd*Ts=" + fmt(tol::kFdTs) + ", rotation of R_K per delay " +
           fmt(2 * oracle::pi * tol::kFdTs * kopt) + " rad");
    verdict(4, diff_ok && coh_ok,
            std::string("5REC h=1/2 Doppler: differential within 3 sigma at every point ") + (diff_ok ? "yes" : "no") +
                ", coherent degradation at 10 dB x" + fmt(ratio, 3));
}

void criterion_5()
{
    std::mt19937_64 rng(555);
    int mismatches = 0;
    int frames = 0;
    struct Case {
        CpmFormat f;
        int K;
    };
    for (const auto& c : {Case{make(PulseFamily::Rec, 1, {1, 2}), 1}, Case{make(PulseFamily::Rec, 3, {3, 4}), 3}}) {
        const auto& f = c.f;
        const auto dt = build_diff_trellis(f, c.K);
        const auto ct = build_coherent_trellis(f);
        int diff_bad = 0, coh_bad = 0;
        for (int n = 0; n < tol::kOracleFrames; ++n) {
            const int len = 1 + n % tol::kOracleMaxPayload;
            const auto layout = FrameLayout::for_delay(f, c.K, len);
            SymbolSequence payload(static_cast<std::size_t>(len));
            for (auto& a : payload) a = rng() & 1u ? 1 : -1;
            ChannelParams ch;
            ch.N0 = noise_level_from_ebn0(f, 2.0);
            ch.seed = rng();
            const auto s = modulate(f, assemble_frame(f, layout, payload));
            const auto r = apply_channel(s, ch);
            ch.psi = 2.0 * oracle::pi * static_cast<double>(rng() % 1000) / 1000.0;
            const auto rk = differential_preprocess(apply_channel(s, ch), c.K, f);

            const auto d = viterbi_detect(rk, dt, layout);
            const auto bd = brute::search(f, len, [&](const SymbolSequence& p) { return brute::differential_metric(f, c.K, layout, rk, p); });
            diff_bad += d.detected != bd.payload;
            const auto co = coherent_detect(r, ct, layout);
            const auto bc = brute::search(f, len, [&](const SymbolSequence& p) { return brute::coherent_metric(f, layout, r, p); });
            coh_bad += co.detected != bc.payload;
            frames += 1;
        }
        detail(f.describe() + " (K=" + std::to_string(c.K) + "): differential mismatches " + std::to_string(diff_bad) + ", coherent mismatches " +
               std::to_string(coh_bad) + " over " + std::to_string(tol::kOracleFrames) + " frames");
        mismatches += diff_bad + coh_bad;
    }
    verdict(5, mismatches == 0, "Viterbi equals exhaustive ML on " + std::to_string(frames) + " noisy frames per detector, " +
                                    std::to_string(mismatches) + " mismatches");
}

void criterion_6()
{
    const std::vector<CpmFormat> formats{make(PulseFamily::Rec, 3, {3, 4}), make(PulseFamily::Rc, 5, {1, 2}), make(PulseFamily::Gaussian, 3, {1, 2}),
                                         make(PulseFamily::Gaussian, 5, {3, 4}), make(PulseFamily::Rec, 1, {1, 3})};
    std::mt19937_64 rng(66);
    auto random_seq = [&](int n) {
        SymbolSequence a(static_cast<std::size_t>(n));
        for (auto& x : a) x = rng() & 1u ? 1 : -1;
        return a;
    };

    double env = 0.0, norm = 0.0, sym = 0.0, decomp = 0.0, delta = 0.0, fact = 0.0;
    bool psi_ok = true;
    for (const auto& f : formats) {
        const double A = f.amplitude();
        for (const auto& x : modulate(f, random_seq(200)).samples) env = std::max(env, std::abs(std::abs(x) - A) / A);

        const double LT = f.L * f.Ts;
        const int n = 20000 * f.L;
        const double dt = LT / n;
        double integral = 0.0;
        for (int k = 0; k < n; ++k) {
            const double b = k + 1 == n ? freq_pulse_eval(f, LT - 1e-15) : freq_pulse_eval(f, (k + 1) * dt);
            integral += dt * (freq_pulse_eval(f, k * dt) + 4.0 * freq_pulse_eval(f, (k + 0.5) * dt) + b) / 6.0;
        }
        norm = std::max(norm, std::abs(integral - 0.5));
        const double peak = freq_pulse_eval(f, LT / 2);
        for (int k = 1; k < 2000; ++k) {
            const double t = LT * k / 2000.0;
            sym = std::max(sym, std::abs(freq_pulse_eval(f, t) - freq_pulse_eval(f, LT - t)) / peak);
        }

        const int K = 2;
        const auto tr = build_diff_trellis(f, K);
        const oracle::Pulse ref(f, 512);
        for (std::size_t s = 0; s < tr.num_states(); s += std::max<std::size_t>(1, tr.num_states() / 16))
            for (int j = 0; j < f.M; ++j) {
                auto a = tr.state(static_cast<std::uint32_t>(s)).history;
                a.push_back(f.symbol(j));
                const auto ph = tr.trellis.branch_phase(s, j);
                for (int m = 0; m < f.sps; ++m) {
                    const double tau = m * f.sample_period();
                    const double direct = oracle::theta(ref, a, tr.memory * f.Ts + tau) - oracle::theta(ref, a, (tr.memory - K) * f.Ts + tau);
                    decomp = std::max(decomp, std::abs(oracle::wrap(ph[static_cast<std::size_t>(m)] - direct)));
                }
            }

        const double eb = differential_bit_energy(f);
        for (int trial = 0; trial < 10; ++trial) {
            const int depth = 6;
            const int n_obs = depth + K + f.L + 2;
            auto a = random_seq(depth);
            auto b = random_seq(depth);
            b[0] = -a[0];
            if (a[0] < 0) std::swap(a, b);
            DifferenceSequence e;
            for (int i = 0; i < depth; ++i) e.e.push_back(a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]);
            auto pad = [&](SymbolSequence x) {
                SymbolSequence full(static_cast<std::size_t>(K), 1);
                full.insert(full.end(), x.begin(), x.end());
                full.resize(static_cast<std::size_t>(K + n_obs), 1);
                return differential_preprocess(modulate(f, full), K, f);
            };
            const auto ra = pad(a), rb = pad(b);
            double d2 = 0.0;
            for (std::size_t k = 0; k < ra.size(); ++k) d2 += std::norm(ra.samples[k] - rb.samples[k]);
            d2 *= f.sample_period();
            const double want = 2.0 * eb * diff_distance(f, K, e, n_obs);
            delta = std::max(delta, std::abs(d2 - want) / want);
        }

        const int Kd = 3;
        const auto dtr = build_diff_trellis(f, Kd);
        const auto layout = FrameLayout::for_delay(f, Kd, 60);
        for (int trial = 0; trial < 5; ++trial) {
            ChannelParams ch;
            ch.N0 = noise_level_from_ebn0(f, 4.0);
            ch.seed = rng();
            const auto s = modulate(f, assemble_frame(f, layout, random_seq(60)));
            const auto base = apply_channel(s, ch);
            const auto d0 = viterbi_detect(differential_preprocess(base, Kd, f), dtr, layout);
            for (double psi : {0.7, 3.0, 5.5}) {
                auto rot = base;
                for (auto& x : rot.samples) x *= std::polar(1.0, psi);
                const auto d1 = viterbi_detect(differential_preprocess(rot, Kd, f), dtr, layout);
                psi_ok = psi_ok && d1.detected == d0.detected && std::abs(d1.final_metric - d0.final_metric) <= 1e-12 * std::abs(d0.final_metric);
            }
            const double fd = 123.0;
            auto shifted = base;
            for (std::size_t k = 0; k < base.size(); ++k) shifted.samples[k] *= std::polar(1.0, 2.0 * oracle::pi * fd * base.time(k));
            const auto r0 = differential_preprocess(base, Kd, f);
            const auto r1 = differential_preprocess(shifted, Kd, f);
            const cplx factor = std::polar(1.0, 2.0 * oracle::pi * fd * Kd * f.Ts);
            double scale = 0.0;
            for (const auto& x : r0.samples) scale = std::max(scale, std::abs(x));
            for (std::size_t k = 0; k < r0.size(); ++k) fact = std::max(fact, std::abs(r1.samples[k] - factor * r0.samples[k]) / scale);
        }
    }
    detail("envelope deviation " + fmt(env, 3) + " (<= 1e-12)");
    detail("pulse normalisation error " + fmt(norm, 3) + ", symmetry error " + fmt(sym, 3) + " (<= 1e-9)");
    detail("branch phase vs direct phase difference " + fmt(decomp, 3) + " rad (<= 1e-9)");
    detail("Delta^2 vs 2 eps_b d^2 relative error " + fmt(delta, 3) + " (<= 1e-6)");
    detail(std::string("phase-offset invariance of detection: ") + (psi_ok ? "identical" : "differs"));
    detail("R_K frequency-offset factorisation error " + fmt(fact, 3) + " (relative, <= 1e-12)");
    const bool ok = env <= tol::kEnvelopeRel && norm <= tol::kPulse && sym <= tol::kPulse && decomp <= tol::kDecomposition &&
                    delta <= tol::kNormalisationRel && psi_ok && fact <= tol::kFactorisationRel;
    verdict(6, ok, "numerical invariants");
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void criterion_7()
{
    const fs::path dir = fs::temp_directory_path() / ("cpmdd_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::vector<std::pair<std::string, std::string>> runs{
        {"ber", "ber --pulse rec --L 3 --h 3/4 --K 3 --ebn0 0:2:8 --payload 120 --max-frames 200 --seed 9"},
        {"ber_coherent", "ber --pulse gauss --L 3 --h 1/2 --detector coherent --ebn0 2:2:6 --max-frames 100 --seed 9 --phase 0.3"},
        {"dmin", "dmin --pulse rc --L 3 --h 1/2 --K 1..4"},
        {"optimize", "optimize-k --pulse gauss --L 3 --h 1/2 --kmax 5"},
        {"doppler", "doppler --pulse rec --L 5 --h 1/2 --K 5 --ebn0 6:4:10 --max-frames 64 --seed 9"},
        {"modulate", "modulate --pulse rc --L 2 --h 1/3 --payload 10 --seed 9"}};
    bool ok = true;
    for (const auto& [name, args] : runs) {
        std::string outs[2];
        int codes[2];
        for (int rep = 0; rep < 2; ++rep) {
            const auto path = dir / (name + std::to_string(rep) + ".csv");
            const std::string cmd = std::string(CPMDD_CLI_PATH) + " " + args + " --out " + path.string() + " >/dev/null 2>&1";
            const int status = std::system(cmd.c_str());
            codes[rep] = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
            outs[rep] = slurp(path);
        }
        const bool same = codes[0] == 0 && codes[1] == 0 && !outs[0].empty() && outs[0] == outs[1];
        detail(name + ": " + (same ? "identical (" + std::to_string(outs[0].size()) + " bytes)" : "DIFFERENT or failed"));
        ok = ok && same;
    }
    fs::remove_all(dir);
    verdict(7, ok, "repeated CLI invocations with equal seeds give bit-identical CSV");
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<std::function<void()>> all{criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7};
    std::vector<int> pick;
    for (int i = 1; i < argc; ++i) pick.push_back(std::atoi(argv[i]));
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (!pick.empty() && std::find(pick.begin(), pick.end(), static_cast<int>(i + 1)) == pick.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        std::cout << "criterion " << i + 1 << " ..." << std::endl;
        all[i]();
        detail("(" + fmt(seconds_since(t0), 3) + " s)");
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}

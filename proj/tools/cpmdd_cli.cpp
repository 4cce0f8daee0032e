// cpmdd: differential / coherent CPM detection experiments.
//
//   cpmdd ber        --pulse rec --L 3 --h 3/4 --K 3 --ebn0 0:1:12 --out ber.csv
//   cpmdd dmin       --pulse rc --L 5 --h 3/4 --K 1..6
//   cpmdd optimize-k --pulse gauss --bt 0.3 --L 3 --h 1/2
//   cpmdd doppler    --pulse rec --L 5 --h 1/2 --K 5 --doppler-hz 100
//   cpmdd modulate   --symbols 1,-1,1 --out samples.csv
//
// Any flag may also come from a flat "key = value" file given with
// --config; flags on the command line win.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "cpmdd/distance.hpp"
#include "cpmdd/errors.hpp"
#include "cpmdd/experiment.hpp"
#include "cpmdd/report.hpp"
#include "cpmdd/waveform.hpp"

using namespace cpmdd;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kCapacity = 3, kIo = 4 };

struct FormatFlags {
    std::string pulse = "rec";
    int M = 2;
    std::string h = "1/2";
    int L = 1;
    double bt = 0.3;
    int sps = 8;
    double Ts = 1e-4;

    CpmFormat build() const
    {
        CpmFormat f;
        f.pulse = parse_pulse_family(pulse);
        f.M = M;
        f.h = ModIndex::parse(h);
        f.L = L;
        f.bt = bt;
        f.sps = sps;
        f.Ts = Ts;
        f.Es = Ts;
        f.validate();
        return f;
    }
};

struct Common {
    FormatFlags format;
    std::uint64_t seed = 1;
    std::string out;
    std::string config;
};

void add_common(CLI::App* app, Common& c)
{
    // "-h" would clash with the modulation index flag --h.
    app->set_help_flag("--help", "print this help and exit");
    app->add_option("--pulse", c.format.pulse, "frequency pulse: rec, rc or gauss")->capture_default_str();
    app->add_option("--M", c.format.M, "alphabet size")->capture_default_str();
    app->add_option("--h", c.format.h, "modulation index num/den")->capture_default_str();
    app->add_option("--L", c.format.L, "pulse length in symbols")->capture_default_str();
    app->add_option("--bt", c.format.bt, "Gaussian bandwidth-time product")->capture_default_str();
    app->add_option("--sps", c.format.sps, "samples per symbol")->capture_default_str();
    app->add_option("--Ts", c.format.Ts, "symbol period in seconds")->capture_default_str();
    app->add_option("--seed", c.seed, "master seed")->capture_default_str();
    app->add_option("--out", c.out, "output path (default stdout)");
    app->add_option("--config", c.config, "flat key = value file with default flag values");
}

struct BerFlags {
    std::string detector = "diff";
    int K = 1;
    std::string ebn0 = "0:1:10";
    int payload = 120;
    long long max_frames = 2'000'000;
    long long target_errors = 200;
    std::string phase = "random";
    double doppler_hz = 0.0;
    int workers = 1;
    std::string plot;
};

void add_ber_flags(CLI::App* app, BerFlags& b, bool with_detector)
{
    if (with_detector) app->add_option("--detector", b.detector, "diff or coherent")->capture_default_str();
    app->add_option("--K", b.K, "differential delay in symbol periods")->capture_default_str();
    app->add_option("--ebn0", b.ebn0, "Eb/N0 grid start:step:stop in dB")->capture_default_str();
    app->add_option("--payload", b.payload, "payload symbols per frame")->capture_default_str();
    app->add_option("--max-frames", b.max_frames, "frame cap per point")->capture_default_str();
    app->add_option("--target-errors", b.target_errors, "bit errors per point before stopping")->capture_default_str();
    app->add_option("--phase", b.phase, "random or a fixed phase in radians")->capture_default_str();
    app->add_option("--doppler-hz", b.doppler_hz, "frequency offset in Hz")->capture_default_str();
    app->add_option("--workers", b.workers, "worker threads per point")->capture_default_str();
    app->add_option("--plot", b.plot, "also write an SVG plot to this path");
}

ExperimentConfig make_experiment(const Common& c, const BerFlags& b)
{
    ExperimentConfig cfg;
    cfg.format = c.format.build();
    cfg.detector = parse_detector(b.detector);
    cfg.K = b.K;
    cfg.ebn0_grid = parse_ebn0_grid(b.ebn0);
    cfg.payload_len = b.payload;
    cfg.max_frames = b.max_frames;
    cfg.target_errors = b.target_errors;
    cfg.phase = PhaseMode::parse(b.phase);
    cfg.fd = b.doppler_hz;
    cfg.master_seed = c.seed;
    cfg.workers = b.workers;
    cfg.validate();
    return cfg;
}

std::pair<int, int> parse_k_range(const std::string& s)
{
    auto to_int = [&](const std::string& part) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(part, &used);
            if (used == part.size()) return v;
        } catch (const std::exception&) {
        }
        throw ConfigError("--K expects <int> or <a>..<b>, got '" + s + "'");
    };
    const auto dots = s.find("..");
    if (dots == std::string::npos) {
        const int k = to_int(s);
        return {k, k};
    }
    return {to_int(s.substr(0, dots)), to_int(s.substr(dots + 2))};
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Turns config-file entries into "--key value" arguments for keys the
// command line does not already set.
std::vector<std::string> config_arguments(const std::string& path, CLI::App* sub, const std::vector<std::string>& argv)
{
    std::ifstream is(path);
    if (!is) throw IoError("cannot read config file '" + path + "'");
    std::vector<std::string> extra;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        const std::string flag = "--" + key;
        if (key == "config" || sub->get_option_no_throw(flag) == nullptr)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown option '" + key + "' for '" +
                              sub->get_name() + "'");
        bool given = false;
        for (const auto& a : argv)
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        if (!given) {
            extra.push_back(flag);
            extra.push_back(value);
        }
    }
    return extra;
}

std::string to_csv(const std::vector<BerPoint>& points)
{
    std::ostringstream os;
    write_ber_csv(os, points);
    return os.str();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Differential and coherent CPM detection: BER, distance and delay optimisation"};
    app.require_subcommand(1);
    app.set_help_flag("--help", "print this help and exit");

    Common common;
    BerFlags ber;
    std::string dmin_k = "1..6";
    int depth = 0;
    int nobs = 0;
    int kmax = 6;
    double tie_db = kDelayTieToleranceDb;
    std::string symbols;
    int mod_payload = 0;

    auto* ber_cmd = app.add_subcommand("ber", "Monte Carlo bit error rate over an Eb/N0 grid");
    add_common(ber_cmd, common);
    add_ber_flags(ber_cmd, ber, true);

    auto* dmin_cmd = app.add_subcommand("dmin", "minimum distance between differential signals per delay");
    add_common(dmin_cmd, common);
    dmin_cmd->add_option("--K", dmin_k, "delay or range a..b")->capture_default_str();
    dmin_cmd->add_option("--depth", depth, "difference sequence depth (0: K+L+4)");
    dmin_cmd->add_option("--nobs", nobs, "observation symbols (0: depth+K+L+2)");

    auto* opt_cmd = app.add_subcommand("optimize-k", "pick the delay with the largest minimum distance");
    add_common(opt_cmd, common);
    opt_cmd->add_option("--kmax", kmax, "largest delay tried")->capture_default_str();
    opt_cmd->add_option("--depth", depth, "difference sequence depth (0: K+L+4)");
    opt_cmd->add_option("--nobs", nobs, "observation symbols (0: depth+K+L+2)");
    opt_cmd->add_option("--tie-db", tie_db, "near-tie tolerance in dB")->capture_default_str();

    BerFlags dop;
    dop.doppler_hz = 100.0;
    auto* dop_cmd = app.add_subcommand("doppler", "differential vs coherent BER with and without Doppler");
    add_common(dop_cmd, common);
    add_ber_flags(dop_cmd, dop, false);

    auto* mod_cmd = app.add_subcommand("modulate", "dump CPM baseband samples as t,re,im");
    add_common(mod_cmd, common);
    mod_cmd->add_option("--symbols", symbols, "comma separated symbols, e.g. 1,-1,3");
    mod_cmd->add_option("--payload", mod_payload, "random symbols drawn from --seed");

    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        // Locate --config before the real parse so its values act as defaults.
        std::string config_path;
        CLI::App* sub = nullptr;
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (!sub)
                for (auto* s : {ber_cmd, dmin_cmd, opt_cmd, dop_cmd, mod_cmd})
                    if (args[i] == s->get_name()) sub = s;
            if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
            if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
        }
        if (!config_path.empty() && sub) {
            auto extra = config_arguments(config_path, sub, args);
            args.insert(args.end(), extra.begin(), extra.end());
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        if (*ber_cmd) {
            const auto cfg = make_experiment(common, ber);
            const auto points = run_ber(cfg);
            write_text(common.out, to_csv(points));
            if (!ber.plot.empty())
                write_text(ber.plot, render_ber_svg(series_from_points(points), cfg.format.describe()));
        } else if (*dmin_cmd) {
            const auto format = common.format.build();
            const auto [k0, k1] = parse_k_range(dmin_k);
            std::ostringstream os;
            write_dmin_csv(os, run_dmin_sweep(format, k0, k1, depth, nobs));
            write_text(common.out, os.str());
        } else if (*opt_cmd) {
            const auto format = common.format.build();
            const auto choice = optimize_delay(format, kmax, depth, nobs, tie_db);
            std::ostringstream os;
            write_dmin_csv(os, choice.reports);
            write_text(common.out, os.str());
            auto& summary = (common.out.empty() || common.out == "-") ? std::cerr : std::cout;
            summary << "optimal K = " << choice.K << " (" << format.describe() << ")\n";
        } else if (*dop_cmd) {
            dop.detector = "diff";
            const auto cfg = make_experiment(common, dop);
            const auto cmp = run_doppler_compare(cfg);
            const auto points = cmp.all();
            write_text(common.out, to_csv(points));
            if (!dop.plot.empty())
                write_text(dop.plot, render_ber_svg(series_from_points(points),
                                                    cfg.format.describe() + ", fd = " + format_double(cfg.fd) + " Hz"));
        } else if (*mod_cmd) {
            const auto format = common.format.build();
            SymbolSequence a;
            if (!symbols.empty()) {
                std::stringstream ss(symbols);
                std::string tok;
                while (std::getline(ss, tok, ',')) {
                    try {
                        a.push_back(std::stoi(tok));
                    } catch (const std::exception&) {
                        throw ConfigError("bad symbol '" + tok + "' in --symbols");
                    }
                }
            } else if (mod_payload > 0) {
                std::mt19937_64 rng(common.seed);
                std::uniform_int_distribution<int> pick(0, format.M - 1);
                for (int i = 0; i < mod_payload; ++i) a.push_back(format.symbol(pick(rng)));
            } else {
                throw ConfigError("modulate needs --symbols or --payload");
            }
            check_symbols(format, a);
            const auto s = modulate(format, a);
            std::ostringstream os;
            os << "t,re,im\n";
            for (std::size_t k = 0; k < s.size(); ++k)
                os << format_double(s.time(k)) << ',' << format_double(s.samples[k].real()) << ','
                   << format_double(s.samples[k].imag()) << '\n';
            write_text(common.out, os.str());
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << '\n';
        return kCapacity;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIo;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kConfig;
    }
    return kOk;
}

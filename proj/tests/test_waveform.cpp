#include <doctest.h>

#include <random>

#include "cpmdd/errors.hpp"
#include "cpmdd/waveform.hpp"
#include "oracles.hpp"

using namespace cpmdd;

namespace {

CpmFormat make(PulseFamily p, int L, ModIndex h, int M = 2)
{
    CpmFormat f;
    f.pulse = p;
    f.L = L;
    f.h = h;
    f.M = M;
    return f.validated();
}

std::vector<CpmFormat> sample_formats()
{
    return {make(PulseFamily::Rec, 1, {1, 2}),      make(PulseFamily::Rec, 3, {3, 4}),
            make(PulseFamily::Rc, 2, {1, 3}),       make(PulseFamily::Rc, 5, {1, 2}),
            make(PulseFamily::Gaussian, 3, {1, 2}), make(PulseFamily::Gaussian, 5, {3, 4}),
            make(PulseFamily::Rec, 2, {1, 4}, 4)};
}

SymbolSequence random_symbols(const CpmFormat& f, int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, f.M - 1);
    SymbolSequence a(static_cast<std::size_t>(n));
    for (auto& x : a) x = f.symbol(pick(rng));
    return a;
}

}  // namespace

TEST_SUITE("waveform") {

TEST_CASE("format validation")
{
    CpmFormat f;
    f.h = {2, 4};
    f.validate();
    CHECK(f.h.num == 1);
    CHECK(f.h.den == 2);

    auto bad = [](auto mutate) {
        CpmFormat g;
        mutate(g);
        CHECK_THROWS_AS(g.validate(), ConfigError);
    };
    bad([](CpmFormat& g) { g.M = 3; });
    bad([](CpmFormat& g) { g.M = 0; });
    bad([](CpmFormat& g) { g.h = {2, 1}; });
    bad([](CpmFormat& g) { g.h = {0, 1}; });
    bad([](CpmFormat& g) { g.sps = 3; });
    bad([](CpmFormat& g) { g.L = 0; });
    bad([](CpmFormat& g) { g.pulse = PulseFamily::Gaussian; g.bt = 0.0; });

    CHECK(ModIndex::parse("3/4").value() == doctest::Approx(0.75));
    CHECK_THROWS_AS(ModIndex::parse("0.75"), ConfigError);
    CHECK(parse_pulse_family("gauss") == PulseFamily::Gaussian);
    CHECK_THROWS_AS(parse_pulse_family("sinc"), ConfigError);

    const auto q = make(PulseFamily::Rec, 1, {1, 4}, 4);
    CHECK(q.alphabet() == std::vector<int>{-3, -1, 1, 3});
    CHECK(q.bits_per_symbol() == 2);
    CHECK_THROWS_AS(check_symbols(q, {1, 2}), InputError);
    CHECK_THROWS_AS(check_symbols(q, {5}), InputError);
}

TEST_CASE("frequency pulse examples")
{
    const auto rec = make(PulseFamily::Rec, 3, {1, 2});
    for (double t : {0.0, 0.7e-4, 1.5e-4, 2.999e-4}) CHECK(freq_pulse_eval(rec, t) == doctest::Approx(1.0 / (6.0 * rec.Ts)));
    CHECK(freq_pulse_eval(rec, 3.0001e-4) == 0.0);
    CHECK(freq_pulse_eval(rec, -1e-9) == 0.0);

    const auto rc = make(PulseFamily::Rc, 2, {1, 2});
    CHECK(std::abs(freq_pulse_eval(rc, 0.0)) < 1e-12);
}

TEST_CASE("pulse normalisation and symmetry")
{
    for (const auto& f : sample_formats()) {
        CAPTURE(f.describe());
        const double LT = f.L * f.Ts;
        const int n = 20000 * f.L;
        const double dt = LT / n;
        double integral = 0.0;
        for (int k = 0; k < n; ++k) {
            const double a = freq_pulse_eval(f, k * dt);
            const double m = freq_pulse_eval(f, (k + 0.5) * dt);
            const double b = k + 1 == n ? freq_pulse_eval(f, LT - 1e-15) : freq_pulse_eval(f, (k + 1) * dt);
            integral += dt * (a + 4.0 * m + b) / 6.0;
        }
        CHECK(std::abs(integral - 0.5) < 1e-9);

        const double g_peak = freq_pulse_eval(f, LT / 2.0);
        for (int k = 1; k < 1000; ++k) {
            const double t = LT * k / 1000.0;
            CHECK(std::abs(freq_pulse_eval(f, t) - freq_pulse_eval(f, LT - t)) <= 1e-9 * g_peak);
        }
    }
}

TEST_CASE("phase pulse against quadrature oracle")
{
    for (const auto& f : sample_formats()) {
        CAPTURE(f.describe());
        const oracle::Pulse ref(f);
        const double LT = f.L * f.Ts;
        CHECK(phase_pulse_eval(f, 0.0) == 0.0);
        CHECK(phase_pulse_eval(f, -f.Ts) == 0.0);
        CHECK(phase_pulse_eval(f, LT) == 0.5);
        CHECK(phase_pulse_eval(f, 3 * LT) == 0.5);
        if (f.pulse != PulseFamily::Gaussian) CHECK(phase_pulse_eval(f, LT / 2.0) == doctest::Approx(0.25).epsilon(1e-12));

        double prev = 0.0;
        for (int k = 0; k <= 200; ++k) {
            const double t = LT * k / 200.0;
            const double q = phase_pulse_eval(f, t);
            CHECK(std::abs(q - ref.q(t)) < 1e-9);
            CHECK(q >= prev - 1e-15);
            prev = q;
        }

        const PulseShape pulse(f);
        REQUIRE(pulse.grid().size() == static_cast<std::size_t>(f.L * f.sps));
        for (int i = 0; i < f.L; ++i)
            for (int m = 0; m < f.sps; ++m)
                CHECK(pulse.grid_at(i, m) == doctest::Approx(pulse.phase(i * f.Ts + m * f.sample_period())).epsilon(1e-14));
        CHECK(pulse.grid_at(-1, 3) == 0.0);
        CHECK(pulse.grid_at(f.L, 0) == 0.5);
    }
}

TEST_CASE("phase trajectory examples")
{
    const auto msk = make(PulseFamily::Rec, 1, {1, 2});
    const PulseShape pulse(msk);
    const std::vector<int> one{1};
    CHECK(phase_at(pulse, one, msk.Ts) == doctest::Approx(oracle::pi / 2));

    // all-ones REC: theta rises linearly at pi h / Ts once every pulse has started
    for (const auto& f : {make(PulseFamily::Rec, 1, {1, 2}), make(PulseFamily::Rec, 3, {3, 4}), make(PulseFamily::Rec, 2, {1, 3})}) {
        CAPTURE(f.describe());
        const std::vector<int> ones(10, 1);
        const auto th = phase_trajectory(f, ones);
        const auto ref = oracle::trajectory(oracle::Pulse(f), ones);
        REQUIRE(th.size() == ref.size());
        for (std::size_t k = 0; k < th.size(); ++k) {
            CHECK(std::abs(th[k] - ref[k]) < 1e-9);
            const double t = static_cast<double>(k) * f.sample_period();
            if (t >= (f.L - 1) * f.Ts) CHECK(std::abs(th[k] - (oracle::pi * f.h.value() * t / f.Ts - oracle::pi * f.h.value() * (f.L - 1) / 2.0)) < 1e-9);
        }
    }
}

TEST_CASE("phase trajectory matches oracle and is odd in the symbols")
{
    std::uint64_t seed = 11;
    for (const auto& f : sample_formats()) {
        CAPTURE(f.describe());
        const auto a = random_symbols(f, 12, seed++);
        const auto th = phase_trajectory(f, a);
        const auto ref = oracle::trajectory(oracle::Pulse(f), a);
        for (std::size_t k = 0; k < th.size(); ++k) CHECK(std::abs(th[k] - ref[k]) < 1e-9);

        SymbolSequence neg = a;
        for (auto& x : neg) x = -x;
        const auto thn = phase_trajectory(f, neg);
        for (std::size_t k = 0; k < th.size(); ++k) CHECK(thn[k] == -th[k]);
    }
}

TEST_CASE("phase increment per saturated symbol")
{
    const auto f = make(PulseFamily::Rc, 3, {1, 3});
    const PulseShape pulse(f);
    const std::vector<int> a(12, -1);
    for (int n = f.L; n < 10; ++n) {
        const double step = phase_at(pulse, a, (n + 1) * f.Ts) - phase_at(pulse, a, n * f.Ts);
        CHECK(step == doctest::Approx(-oracle::pi * f.h.value()).epsilon(1e-12));
    }
}

TEST_CASE("modulate: constant envelope, phase and conjugate symmetry")
{
    std::uint64_t seed = 99;
    for (auto f : sample_formats()) {
        f.Es = 3.7e-4;
        CAPTURE(f.describe());
        const auto a = random_symbols(f, 40, seed++);
        const auto s = modulate(f, a);
        const double A = std::sqrt(f.Es / f.Ts);
        CHECK(s.size() == a.size() * static_cast<std::size_t>(f.sps));
        CHECK(s.sample_period == f.sample_period());
        CHECK(s.start_time == 0.0);
        const auto th = phase_trajectory(f, a);
        SymbolSequence neg = a;
        for (auto& x : neg) x = -x;
        const auto sn = modulate(f, neg);
        for (std::size_t k = 0; k < s.size(); ++k) {
            CHECK(std::abs(std::abs(s.samples[k]) - A) <= 1e-12 * A);
            CHECK(std::abs(s.samples[k] - std::polar(A, th[k])) <= 1e-12 * A);
            CHECK(std::abs(sn.samples[k] - std::conj(s.samples[k])) <= 1e-12 * A);
        }
    }

    const auto msk = make(PulseFamily::Rec, 1, {1, 2});
    const auto s = modulate(msk, std::vector<int>{1, 1});
    CHECK(std::abs(s.samples[static_cast<std::size_t>(msk.sps)] - oracle::cplx(0.0, 1.0)) < 1e-12);
    CHECK_THROWS_AS(modulate(msk, std::vector<int>{}), InputError);
}

}  // TEST_SUITE

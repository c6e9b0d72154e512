#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "quaver/sim.hpp"
#include "quaver/state_prep.hpp"

using namespace quaver;

namespace {

double norm2(const StateVector& state) {
    double sum = 0.0;
    for (const auto& a : state.amp) sum += std::norm(a);
    return sum;
}

Circuit random_circuit(std::mt19937_64& gen, int k, int gates) {
    Circuit c;
    c.num_qubits = k;
    for (int i = 0; i < gates; ++i) {
        switch (gen() % 3) {
            case 0: c.x(static_cast<int>(gen() % k)); break;
            case 1:
                c.ry(static_cast<double>(gen() >> 11) * 0x1.0p-53 * 6.28, static_cast<int>(gen() % k));
                break;
            default: {
                if (k < 2) { c.x(0); break; }
                int a = static_cast<int>(gen() % k);
                int b = static_cast<int>(gen() % (k - 1));
                if (b >= a) ++b;
                c.cx(a, b);
            }
        }
    }
    return c;
}

} // namespace

TEST_CASE("run: empty circuit leaves |000>") {
    Circuit c;
    c.num_qubits = 3;
    auto state = run(c);
    CHECK(state.amp[0] == std::complex<double>{1.0, 0.0});
    for (std::size_t i = 1; i < 8; ++i) CHECK(state.amp[i] == std::complex<double>{0.0, 0.0});
}

TEST_CASE("run: X on q0 gives |1>") {
    Circuit c;
    c.num_qubits = 1;
    c.x(0);
    auto state = run(c);
    CHECK(state.amp[0] == std::complex<double>{0.0, 0.0});
    CHECK(state.amp[1] == std::complex<double>{1.0, 0.0});
}

TEST_CASE("run: RY rotates within the real plane") {
    Circuit c;
    c.num_qubits = 1;
    c.ry(2.0 * std::acos(std::sqrt(0.3)), 0);
    auto state = run(c);
    CHECK(state.amp[0].real() == doctest::Approx(std::sqrt(0.3)).epsilon(1e-12));
    CHECK(state.amp[1].real() == doctest::Approx(std::sqrt(0.7)).epsilon(1e-12));
}

TEST_CASE("run: CX permutes amplitudes under the control") {
    Circuit c;
    c.num_qubits = 2;
    c.x(1);
    c.cx(1, 0);  // control q1, target q0
    auto state = run(c);
    CHECK(state.amp[3].real() == doctest::Approx(1.0));
}

TEST_CASE("run: the 30/70 circuit lands sqrt(0.3) on 000 and sqrt(0.7) on 101") {
    std::vector<double> target = {std::sqrt(0.3), 0, 0, 0, 0, std::sqrt(0.7), 0, 0};
    auto state = run(prepare_state(target, 3));
    CHECK(state.amp[0].real() == doctest::Approx(std::sqrt(0.3)).epsilon(1e-9));
    CHECK(state.amp[5].real() == doctest::Approx(std::sqrt(0.7)).epsilon(1e-9));
}

TEST_CASE("unitarity: RY(theta) then RY(-theta) restores the state") {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 20; ++trial) {
        auto prep = random_circuit(gen, 3, 10);
        auto before = run(prep);
        double theta = static_cast<double>(gen() % 1000) / 200.0;
        Circuit c = prep;
        c.ry(theta, 1);
        c.ry(-theta, 1);
        auto after = run(c);
        for (std::size_t i = 0; i < 8; ++i)
            CHECK(std::abs(after.amp[i] - before.amp[i]) < 1e-12);
    }
}

TEST_CASE("norm preservation across random circuits") {
    std::mt19937_64 gen(17);
    for (int trial = 0; trial < 50; ++trial) {
        auto state = run(random_circuit(gen, 4, 40));
        CHECK(norm2(state) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("run rejects oversized registers") {
    Circuit c;
    c.num_qubits = 21;
    CHECK_THROWS_AS(run(c), std::invalid_argument);
}

TEST_CASE("sample: a deterministic state always yields its basis value") {
    Circuit c;
    c.num_qubits = 3;
    c.x(0);
    auto counts = sample(run(c), 500, 99);
    REQUIRE(counts.counts.size() == 1);
    CHECK(counts.counts.at(0b001) == 500);
    CHECK(counts.shots == 500);
}

TEST_CASE("sample: 30/70 state at 100000 shots lands near 0.70") {
    std::vector<double> target = {std::sqrt(0.3), 0, 0, 0, 0, std::sqrt(0.7), 0, 0};
    auto state = run(prepare_state(target, 3));
    auto counts = sample(state, 100000, 2024);
    double freq5 = counts.counts.at(5) / 100000.0;
    CHECK(freq5 > 0.69);
    CHECK(freq5 < 0.71);
    std::uint64_t total = 0;
    for (const auto& [v, c] : counts.counts) total += c;
    CHECK(total == 100000);
}

TEST_CASE("sample: full bit-flip noise turns |000> into the uniform distribution") {
    Circuit c;
    c.num_qubits = 3;
    auto counts = sample(run(c), 100000, 7, NoiseModel{0.5});
    // each outcome is Binomial(100000, 1/8): sigma = 104.6
    for (std::uint32_t v = 0; v < 8; ++v) {
        auto n = static_cast<double>(counts.counts.at(v));
        CHECK(std::abs(n - 12500.0) < 3.0 * 104.6);
    }
}

TEST_CASE("sample: determinism per seed") {
    std::vector<double> target = {0.5, 0.5, 0.5, 0.5};
    auto state = run(prepare_state(target, 2));
    auto a = sample(state, 1000, 42, NoiseModel{0.1});
    auto b = sample(state, 1000, 42, NoiseModel{0.1});
    auto c = sample(state, 1000, 43, NoiseModel{0.1});
    CHECK(a.counts == b.counts);
    CHECK(a.counts != c.counts);
}

TEST_CASE("sampling soundness: empirical frequencies track |amp|^2") {
    std::mt19937_64 gen(19);
    std::vector<double> target(8);
    double n2 = 0.0;
    for (auto& v : target) {
        v = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        n2 += v * v;
    }
    for (auto& v : target) v /= std::sqrt(n2);
    auto state = run(prepare_state(target, 3));
    auto counts = sample(state, 1000000, 77);
    double tvd = 0.0;
    for (std::uint32_t v = 0; v < 8; ++v) {
        auto it = counts.counts.find(v);
        double freq = it == counts.counts.end() ? 0.0 : it->second / 1e6;
        tvd += std::abs(freq - target[v] * target[v]);
    }
    CHECK(tvd / 2.0 < 0.01);
}

TEST_CASE("majority picks the most frequent outcome") {
    ShotCounts counts;
    counts.counts = {{5, 700}, {0, 300}};
    counts.shots = 1000;
    CHECK(majority(counts, 1) == 5);

    ShotCounts single;
    single.counts = {{3, 1}};
    single.shots = 1;
    CHECK(majority(single, 1) == 3);
}

TEST_CASE("majority breaks ties reproducibly per seed") {
    ShotCounts tie;
    tie.counts = {{2, 10}, {6, 10}};
    tie.shots = 20;
    auto first = majority(tie, 123);
    CHECK((first == 2 || first == 6));
    for (int i = 0; i < 10; ++i) CHECK(majority(tie, 123) == first);
    bool saw_other = false;
    for (std::uint64_t seed = 0; seed < 50 && !saw_other; ++seed)
        saw_other = majority(tie, seed) != first;
    CHECK(saw_other);
}

TEST_CASE("shot bias: majority of 1001 shots on a 20/80 rule always picks the 80%") {
    std::vector<double> target = {std::sqrt(0.2), 0, std::sqrt(0.8), 0, 0, 0, 0, 0};
    auto state = run(prepare_state(target, 3));
    int picked_heavy = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed)
        if (majority(sample(state, 1001, seed), seed) == 2) ++picked_heavy;
    CHECK(picked_heavy == 100);
}

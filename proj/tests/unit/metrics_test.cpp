#include <doctest.h>

#include "papm/errors.hpp"
#include "papm/kernel.hpp"
#include "papm/metrics.hpp"
#include "papm/scenario.hpp"

using namespace papm;

TEST_CASE("IAE slices") {
    IaeAccumulator iae(2);
    for (int i = 0; i < 1000; ++i) iae.add(0, -1.0, 1.0, 1e-3);
    CHECK(iae.loop(0) == doctest::Approx(1.0));
    iae.add(1, 0.0, 2.0, 0.5);
    CHECK(iae.loop(1) == doctest::Approx(0.5));
    CHECK(iae.total() == iae.loop(0) + iae.loop(1));
}

TEST_CASE("energy integral over piecewise-constant speed") {
    EnergyAccumulator e;
    e.set_speed(0, 0.5);
    e.advance(0, 2'000'000);
    CHECK(e.integral() == doctest::Approx(0.5));
    e.set_speed(2'000'000, 1.0);
    e.advance(2'000'000, 3'000'000);
    CHECK(*e.average() == doctest::Approx(1.5 / 3.0));
    CHECK(energy_from_changes(e.changes(), 3'000'000) == doctest::Approx(e.integral()));
}

TEST_CASE("energy accounting rejects disorder") {
    EnergyAccumulator e;
    e.set_speed(0, 1.0);
    e.advance(0, 10);
    CHECK_THROWS_AS(e.advance(5, 20), InternalError);
    CHECK_THROWS_AS(e.advance(10, 9), InternalError);
    CHECK_THROWS_AS(e.set_speed(3, 0.5), InternalError);
}

TEST_CASE("same-tick speed changes keep only the last") {
    EnergyAccumulator e;
    e.set_speed(0, 1.0);
    e.advance(0, 10);
    e.set_speed(10, 0.5);
    e.set_speed(10, 1.0);
    CHECK(e.changes().size() == 1);
    e.set_speed(10, 0.7);
    CHECK(e.changes().size() == 2);
}

TEST_CASE("empty run has no average") {
    EnergyAccumulator e;
    CHECK_FALSE(e.average().has_value());
}

TEST_CASE("run energy recomputes exactly from the speed changes") {
    for (const auto& name : builtin_cpu_names()) {
        auto s = builtin_table1();
        s.cpu = *find_builtin_cpu(name);
        const auto r = Simulator(s).run();
        const double avg = energy_from_changes(r.energy.changes(), r.duration) /
                           (static_cast<double>(r.duration) * kTickSeconds);
        CHECK(avg == doctest::Approx(*r.energy.average()).epsilon(1e-12));
        const double lo = s.cpu.ideal ? 0.0 : s.cpu.lowest() * s.cpu.lowest();
        CHECK(*r.energy.average() >= lo);
        CHECK(*r.energy.average() <= 1.0);
    }
}

TEST_CASE("halving the micro-step barely moves IAE") {
    auto s = builtin_table1();
    s.cpu = *find_builtin_cpu("CPU-2");
    const auto coarse = Simulator(s).run();
    s.micro_step_us = 50;
    const auto fine = Simulator(s).run();
    for (std::size_t i = 0; i < s.loops.size(); ++i) {
        CHECK(fine.iae.loop(i) == doctest::Approx(coarse.iae.loop(i)).epsilon(1e-3));
    }
}

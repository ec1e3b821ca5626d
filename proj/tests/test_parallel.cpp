#include "srf/bb84.hpp"
#include "srf/optimal.hpp"
#include "srf/parallel.hpp"

#include <doctest.h>

using namespace srf;

TEST_CASE("streams depend only on seed and id") {
    Rng a = make_stream(7, 3);
    Rng b = make_stream(7, 3);
    Rng c = make_stream(7, 4);
    Rng d = make_stream(8, 3);
    const auto x = a();
    CHECK(x == b());
    CHECK(x != c());
    CHECK(x != d());
}

TEST_CASE("parallel trial map equals the serial reference") {
    const auto kernel = [](std::int64_t i, Rng& rng) { return double(i) + uniform01(rng); };
    const auto serial = map_trials_serial<double>(1000, 11, kernel);
    for (int jobs : {1, 2, 4, 7}) CHECK(map_trials<double>(1000, 11, Jobs{jobs}, kernel) == serial);
}

TEST_CASE("protocol runs equal their serial references") {
    OptimalParams p;
    p.n_spins = 12;
    p.trials = 500;
    const OptimalResult serial = run_optimal_serial(p, 4);
    for (int jobs : {1, 3}) {
        const OptimalResult par = run_optimal(p, 4, Jobs{jobs});
        CHECK(par.stats.rms == serial.stats.rms);
        CHECK(par.stats.max == serial.stats.max);
        CHECK(par.invariance_max_dev == serial.invariance_max_dev);
    }

    Bb84Params b;
    b.n_spins = 6;
    b.rounds = 300;
    b.eve = EveModel::of(EveKind::measure_reprepare);
    const Bb84Result bs = run_bb84_serial(b, 9);
    const Bb84Result bp = run_bb84(b, 9, Jobs{4});
    CHECK(bs.mismatches == bp.mismatches);
    CHECK(bs.frame_error == bp.frame_error);
    CHECK(bs.kept_orientation == bp.kept_orientation);
}

#include <doctest.h>

#include "eatune/domain.hpp"

using namespace eatune;

TEST_CASE("validate_config on the default grid") {
  const FrequencyGrid grid;
  CHECK(validate_config(24, 2.0, 1.5, grid));
  CHECK_FALSE(validate_config(24, 2.55, 1.5, grid));
  CHECK_FALSE(validate_config(0, 2.0, 1.5, grid));
  CHECK_FALSE(validate_config(24, 1.1, 1.5, grid));
  CHECK_FALSE(validate_config(24, 2.0, 3.1, grid));
  CHECK(validate_config(24, 2.0 + 5e-10, 1.5, grid));
  CHECK_FALSE(validate_config(24, 2.0 + 1e-6, 1.5, grid));
}

TEST_CASE("default grid enumerates 14 x 18 points") {
  const FrequencyGrid grid;
  CHECK(grid.core_values().size() == 14);
  CHECK(grid.uncore_values().size() == 18);
  CHECK(grid.size() == 252);
  CHECK(grid.core_values().front() == Frequency::from_ghz(1.2));
  CHECK(grid.core_values().back() == Frequency::from_ghz(2.5));
  CHECK(grid.uncore_values().front() == Frequency::from_ghz(1.3));
  CHECK(grid.uncore_values().back() == Frequency::from_ghz(3.0));
}

TEST_CASE("coarser grid steps stay on their own lattice") {
  const FrequencyGrid grid(1.2, 2.4, 0.2, 1.3, 2.9, 0.4);
  CHECK(grid.core_count() == 7);
  CHECK(grid.uncore_count() == 5);
  CHECK(grid.contains_core(Frequency::from_ghz(1.4)));
  CHECK_FALSE(grid.contains_core(Frequency::from_ghz(1.5)));
  CHECK_FALSE(validate_config(24, 2.5, 1.3, grid));
}

TEST_CASE("inconsistent grids are rejected") {
  CHECK_THROWS_AS(FrequencyGrid(2.5, 1.2, 0.1, 1.3, 3.0, 0.1), Error);
  CHECK_THROWS_AS(FrequencyGrid(1.2, 2.5, 0.0, 1.3, 3.0, 0.1), Error);
  CHECK_THROWS_AS(FrequencyGrid(1.25, 2.5, 0.1, 1.3, 3.0, 0.1), Error);
}

TEST_CASE("frequency lattice conversion") {
  CHECK(Frequency::from_ghz(2.4).deci() == 24);
  CHECK(Frequency::from_ghz(0.1 + 0.2).deci() == 3);
  CHECK_FALSE(Frequency::try_from_ghz(2.55).has_value());
  CHECK_THROWS_AS(Frequency::from_ghz(2.55), Error);
  CHECK(format_ghz(Frequency::from_deci(17)) == "1.70");
}

TEST_CASE("PmcVector rejects negative counts") {
  CounterValues v = CounterValues::Ones();
  v(3) = -1.0;
  CHECK_THROWS_AS(PmcVector{v}, Error);
  CHECK(PmcVector(CounterValues::Ones())[Counter::L2Dcr] == 1.0);
  CHECK(kCounterNames[static_cast<int>(Counter::ResStl)] == "RES_STL");
}

TEST_CASE("phase samples need positive duration and energy") {
  PhaseSample s;
  s.duration = 1.0;
  s.node_energy = 0.0;
  CHECK_THROWS_AS(check_sample(s), Error);
  s.node_energy = 10.0;
  CHECK_NOTHROW(check_sample(s));
  s.duration = 0.0;
  CHECK_THROWS_AS(check_sample(s), Error);
}

TEST_CASE("tuning model lookup") {
  TuningModel tm;
  tm.default_config = default_system_config();
  const SystemConfig a{20, Frequency::from_ghz(2.4), Frequency::from_ghz(2.0)};
  tm.scenarios.push_back(Scenario{a, {"x", "y"}});
  CHECK(tm.lookup("x") == a);
  CHECK_FALSE(tm.lookup("z").has_value());
  CHECK(default_system_config().core == Frequency::from_ghz(2.5));
  CHECK(default_system_config().uncore == Frequency::from_ghz(3.0));
}

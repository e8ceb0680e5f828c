#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "coadapt/control.hpp"

using namespace coadapt;

namespace {
PolicyVector one_coord(double value = 1.0, double step = 0.5) {
  PolicyVector p;
  p.coords.push_back({.name = "p", .value = value, .lower = 0.0, .upper = 3.0,
                      .step = step, .search = true});
  return p;
}
}  // namespace

TEST_CASE("policy validation") {
  PolicyVector p = one_coord();
  CHECK_NOTHROW(validate_policy(p));
  p.coords.push_back(p.coords[0]);
  CHECK_THROWS_AS(validate_policy(p), InvalidArgument);  // duplicate name
  p = one_coord(5.0);
  CHECK_THROWS_AS(validate_policy(p), OutOfBounds);
  p = one_coord(1.0, 0.0);
  CHECK_THROWS_AS(validate_policy(p), InvalidArgument);  // zero step
  CHECK(parse_regime("VPCA") == Regime::VPCA);
  CHECK_THROWS_AS(parse_regime("XYZ"), SchemaError);
  CHECK(policy_varies(Regime::VPVA));
  CHECK_FALSE(policy_varies(Regime::CPVA));
  CHECK(agents_adapt(Regime::CPVA));
  CHECK_FALSE(agents_adapt(Regime::VPCA));
}

// Scripted probe/accept/revert sequence checked value by value.
TEST_CASE("online search accepts improvements and reverts failures") {
  PolicyVector p = one_coord(1.0, 0.5);
  SearchState st;

  online_policy_step(p, st, -1.0, 0.0);  // baseline; propose +0.5
  CHECK(p.coords[0].value == 1.5);
  CHECK(st.pending);

  online_policy_step(p, st, -0.5, 0.0);  // improved by 0.5 -> keep; propose -0.5
  CHECK(p.coords[0].value == 1.0);
  CHECK(st.last_accepted_j == -0.5);

  online_policy_step(p, st, -0.9, 0.0);  // worse -> revert to 1.5; propose +0.5
  CHECK(p.coords[0].value == 2.0);

  online_policy_step(p, st, -0.5, 0.0);  // not better than -0.5 -> revert to 1.5
  CHECK(st.last_accepted_j == -0.5);
  CHECK(st.pending);  // a fresh probe is already staged
}

TEST_CASE("online search respects bounds") {
  PolicyVector p = one_coord(3.0, 0.5);
  SearchState st;
  online_policy_step(p, st, -1.0, 0.0);  // +0.5 clamps at upper
  CHECK(p.coords[0].value == 3.0);
}

TEST_CASE("probes cycle +c0, -c0, +c1, -c1") {
  PolicyVector p;
  p.coords.push_back({.name = "a", .value = 1.0, .lower = 0.0, .upper = 2.0, .step = 0.1,
                      .search = true});
  p.coords.push_back({.name = "b", .value = 1.0, .lower = 0.0, .upper = 2.0, .step = 0.1,
                      .search = true});
  SearchState st;
  std::vector<std::pair<std::size_t, int>> seen;
  // constant feedback: every probe reverts, so the probe schedule is visible
  for (int k = 0; k < 4; ++k) {
    online_policy_step(p, st, -1.0, 0.0);
    seen.emplace_back(st.pending_coord, st.sign);
  }
  // sign recorded after flip; the proposed directions are +a, -a, +b, -b
  CHECK(seen[0].first == 0);
  CHECK(seen[1].first == 0);
  CHECK(seen[2].first == 1);
  CHECK(seen[3].first == 1);
  CHECK(p.coords[0].value == Catch::Approx(1.0).margin(1e-12));  // all reverted
}

TEST_CASE("frozen coordinates are never probed") {
  PolicyVector p;
  p.coords.push_back({.name = "a", .value = 1.0, .lower = 0.0, .upper = 2.0, .step = 0.1,
                      .search = false});
  p.coords.push_back({.name = "b", .value = 1.0, .lower = 0.0, .upper = 2.0, .step = 0.1,
                      .search = true});
  SearchState st;
  for (int k = 0; k < 6; ++k) {
    online_policy_step(p, st, -1.0, 0.0);
    CHECK(st.pending_coord == 1);
    CHECK(p.coords[0].value == 1.0);
  }
}

TEST_CASE("a non-finite tolerance freezes the searcher completely") {
  PolicyVector p = one_coord(1.0, 0.5);
  SearchState st;
  for (int k = 0; k < 10; ++k)
    online_policy_step(p, st, -1.0 + 0.1 * k, std::numeric_limits<double>::infinity());
  CHECK(p.coords[0].value == 1.0);
  CHECK(st.epoch == 0);
  CHECK_FALSE(st.pending);
}

namespace {
double bowl(double a, double b) { return -((a - 2.0) * (a - 2.0) + (b - 3.0) * (b - 3.0)); }

// Independent greedy reference on the integer lattice: from (0,0), repeatedly
// move to the best of the four unit neighbors while it strictly improves.
std::pair<double, double> lattice_oracle(int& moves) {
  double a = 0.0, b = 0.0;
  moves = 0;
  for (;;) {
    double best = bowl(a, b), na = a, nb = b;
    const double cand[4][2] = {{a + 1, b}, {a - 1, b}, {a, b + 1}, {a, b - 1}};
    for (const auto& c : cand) {
      if (c[0] < 0.0 || c[0] > 5.0 || c[1] < 0.0 || c[1] > 5.0) continue;
      if (bowl(c[0], c[1]) > best) {
        best = bowl(c[0], c[1]);
        na = c[0];
        nb = c[1];
      }
    }
    if (na == a && nb == b) return {a, b};
    a = na;
    b = nb;
    ++moves;
  }
}
}  // namespace

TEST_CASE("offline climb finds the quadratic optimum like the lattice oracle") {
  int oracle_moves = 0;
  const auto [oa, ob] = lattice_oracle(oracle_moves);
  CHECK(oa == 2.0);
  CHECK(ob == 3.0);
  CHECK(oracle_moves == 5);

  PolicyVector p0;
  p0.coords.push_back({.name = "a", .value = 0.0, .lower = 0.0, .upper = 5.0, .step = 1.0,
                       .search = true});
  p0.coords.push_back({.name = "b", .value = 0.0, .lower = 0.0, .upper = 5.0, .step = 1.0,
                       .search = true});
  auto eval = [](const PolicyVector& p) {
    return std::make_pair(bowl(p.coords[0].value, p.coords[1].value), 0.0);
  };
  const HillClimbResult res = hill_climb_offline(eval, p0, 0.0, 200);
  CHECK(res.best.coords[0].value == oa);
  CHECK(res.best.coords[1].value == ob);
  CHECK(res.best_j == 0.0);
  CHECK(res.evaluations <= 200);
  CHECK_FALSE(res.budget_exhausted);

  int accepted = 0;
  for (const auto& pt : res.trace)
    if (pt.accepted) ++accepted;
  CHECK(accepted == oracle_moves + 1);  // incumbent plus each move
  CHECK(static_cast<int>(res.trace.size()) == res.evaluations);
}

TEST_CASE("offline climb refines with decayed steps") {
  // optimum at a = 1.3, start 1.0, initial step 1.0: needs decay to approach
  PolicyVector p0;
  p0.coords.push_back({.name = "a", .value = 1.0, .lower = 0.0, .upper = 5.0, .step = 1.0,
                       .search = true});
  auto eval = [](const PolicyVector& p) {
    const double a = p.coords[0].value;
    return std::make_pair(-(a - 1.3) * (a - 1.3), 0.0);
  };
  const HillClimbResult res = hill_climb_offline(eval, p0, 0.0, 500);
  CHECK(res.best.coords[0].value == Catch::Approx(1.3).margin(2e-3));
}

TEST_CASE("offline climb reports budget exhaustion") {
  PolicyVector p0 = one_coord(0.0, 0.5);
  p0.coords[0].lower = 0.0;
  auto eval = [](const PolicyVector& p) {
    return std::make_pair(p.coords[0].value, 0.0);
  };
  const HillClimbResult res = hill_climb_offline(eval, p0, 0.0, 3);
  CHECK(res.budget_exhausted);
  CHECK(res.evaluations <= 3);
}

TEST_CASE("scm validation catches unknowns and within-slice cycles") {
  ScmGraph g;
  g.variables = {"P", "x", "E"};
  g.edges = {{"P", "x", false}, {"x", "E", false}};
  CHECK_NOTHROW(validate_scm(g));

  ScmGraph bad = g;
  bad.edges.push_back({"E", "q", false});
  CHECK_THROWS_AS(validate_scm(bad), UnknownVariable);

  ScmGraph cyc = g;
  cyc.edges.push_back({"E", "P", false});
  try {
    validate_scm(cyc);
    FAIL("expected CycleDetected");
  } catch (const CycleDetected& e) {
    CHECK(std::string(e.what()).find("->") != std::string::npos);
  }

  // the same feedback as a lagged edge is legal
  ScmGraph lag = g;
  lag.edges.push_back({"E", "P", true});
  CHECK_NOTHROW(validate_scm(lag));
}

TEST_CASE("do() removes lagged edges into the policy and pins values") {
  ScmGraph g;
  g.variables = {"P", "x", "E"};
  g.edges = {{"P", "x", false}, {"x", "E", false}, {"E", "P", true}, {"E", "x", true}};
  PolicyVector pin = one_coord(2.0, 0.5);
  const ScmGraph cut = apply_intervention(g, pin);
  REQUIRE(cut.intervention.has_value());
  CHECK(cut.intervention->coords[0].value == 2.0);
  bool feedback_present = false;
  bool other_lag_present = false;
  for (const auto& e : cut.edges) {
    if (e.cross_step && e.to == "P") feedback_present = true;
    if (e.cross_step && e.to == "x") other_lag_present = true;
  }
  CHECK_FALSE(feedback_present);
  CHECK(other_lag_present);

  PolicyVector outside = one_coord(2.0, 0.5);
  outside.coords[0].value = 99.0;
  CHECK_THROWS_AS(apply_intervention(g, outside), OutOfBounds);
}

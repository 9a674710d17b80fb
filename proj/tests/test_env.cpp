#include <doctest.h>

#include <algorithm>
#include <vector>

#include "fsrl/env.hpp"

using namespace fsrl;

namespace {

// Independent re-derivation of the broadcast rule, agent by agent.
std::vector<Outcome> broadcast_oracle(const std::vector<Action>& actions,
                                      const std::set<int>& jammed) {
  std::vector<Outcome> out(actions.size(), 0);
  for (std::size_t m = 0; m < actions.size(); ++m) {
    if (actions[m] == 0) continue;
    bool ok = jammed.count(actions[m]) == 0;
    for (std::size_t o = 0; o < actions.size() && ok; ++o) {
      if (o != m && actions[o] == actions[m]) ok = false;
    }
    out[m] = ok ? 1 : -1;
  }
  return out;
}

// Independent re-derivation of the chain interference rule (1-based).
std::vector<Outcome> adhoc_oracle(const std::vector<Action>& actions) {
  const int M = static_cast<int>(actions.size());
  std::vector<Outcome> out(actions.size(), 0);
  for (int i = 1; i <= M; ++i) {
    Action a = actions[i - 1];
    if (a == 0) continue;
    std::vector<int> interferers =
        i < M ? std::vector<int>{i + 1, i + 2} : std::vector<int>{M - 1, M - 2};
    bool ok = true;
    for (int j : interferers) {
      if (j >= 1 && j <= M && actions[j - 1] == a) ok = false;
    }
    out[i - 1] = ok ? 1 : -1;
  }
  return out;
}

// Iterates all (N+1)^M action tuples.
template <typename F>
void for_all_tuples(int M, int N, F&& f) {
  std::vector<Action> actions(M, 0);
  while (true) {
    f(actions);
    int i = 0;
    while (i < M && ++actions[i] > N) actions[i++] = 0;
    if (i == M) break;
  }
}

}  // namespace

TEST_CASE("broadcast: unique transmitters succeed") {
  CHECK(step_broadcast({1, 2, 0}, 2) == std::vector<Outcome>{1, 1, 0});
}

TEST_CASE("broadcast: same-band transmissions collide") {
  CHECK(step_broadcast({1, 1}, 1) == std::vector<Outcome>{-1, -1});
}

TEST_CASE("broadcast: jammed band kills a lone transmitter") {
  CHECK(step_broadcast({3}, 3, {3}) == std::vector<Outcome>{-1});
}

TEST_CASE("broadcast: invalid action names the agent") {
  CHECK_THROWS_WITH_AS(step_broadcast({1, 4}, 3), doctest::Contains("agent 2"),
                       std::invalid_argument);
  CHECK_THROWS_AS(step_broadcast({-1}, 3), std::invalid_argument);
}

TEST_CASE("broadcast: exhaustive oracle M<=4 N<=3, with and without jam") {
  for (int M = 1; M <= 4; ++M) {
    for (int N = 1; N <= 3; ++N) {
      for (int jam = 0; jam <= N; ++jam) {
        std::set<int> jammed;
        if (jam > 0) jammed.insert(jam);
        for_all_tuples(M, N, [&](const std::vector<Action>& actions) {
          CHECK(step_broadcast(actions, N, jammed) ==
                broadcast_oracle(actions, jammed));
        });
      }
    }
  }
}

TEST_CASE("broadcast invariants over all tuples") {
  for_all_tuples(4, 3, [&](const std::vector<Action>& actions) {
    auto out = step_broadcast(actions, 3);
    int successes = std::count(out.begin(), out.end(), 1);
    CHECK(successes <= 3);
    // two agents on one band never both succeed
    for (std::size_t a = 0; a < actions.size(); ++a) {
      for (std::size_t b = a + 1; b < actions.size(); ++b) {
        if (actions[a] != 0 && actions[a] == actions[b]) {
          CHECK(!(out[a] == 1 && out[b] == 1));
        }
      }
    }
  });
}

TEST_CASE("broadcast: permutation symmetry") {
  std::vector<Action> actions{1, 2, 2, 0};
  auto base = step_broadcast(actions, 2);
  std::vector<int> perm{3, 0, 2, 1};
  std::vector<Action> permuted(4);
  for (int i = 0; i < 4; ++i) permuted[i] = actions[perm[i]];
  auto out = step_broadcast(permuted, 2);
  for (int i = 0; i < 4; ++i) CHECK(out[i] == base[perm[i]]);
}

TEST_CASE("broadcast: pure function of inputs") {
  std::vector<Action> actions{1, 1, 2};
  auto a = step_broadcast(actions, 2);
  auto b = step_broadcast(actions, 2);
  CHECK(a == b);
}

TEST_CASE("adhoc: chain rule per agent") {
  // agent 1 is interfered by agent 3 on the shared band; agents 3 and 4
  // are clear
  CHECK(step_adhoc({1, 0, 1, 0}, 1) == std::vector<Outcome>{-1, 0, 1, 0});
  // spatial reuse: ends of the chain can both succeed on one band
  CHECK(step_adhoc({1, 0, 0, 1}, 1) == std::vector<Outcome>{1, 0, 0, 1});
  CHECK(step_adhoc({1, 1, 0}, 1) == std::vector<Outcome>{-1, 1, 0});
  CHECK(step_adhoc({0, 0, 0}, 2) == std::vector<Outcome>{0, 0, 0});
}

TEST_CASE("adhoc: spatial reuse can exceed the band count") {
  auto out = step_adhoc({1, 2, 0, 1, 2, 0}, 2);
  CHECK(std::count(out.begin(), out.end(), 1) == 4);
}

TEST_CASE("adhoc: M < 3 rejected") {
  CHECK_THROWS_AS(step_adhoc({1, 1}, 1), std::invalid_argument);
}

TEST_CASE("adhoc: exhaustive oracle M<=5 N<=2") {
  for (int M = 3; M <= 5; ++M) {
    for (int N = 1; N <= 2; ++N) {
      for_all_tuples(M, N, [&](const std::vector<Action>& actions) {
        CHECK(step_adhoc(actions, N) == adhoc_oracle(actions));
      });
    }
  }
}

TEST_CASE("jammed_bands_at schedule") {
  NetworkConfig cfg;
  cfg.num_bands = 3;
  cfg.horizon = 150000;
  CHECK(jammed_bands_at(1, cfg).empty());

  cfg.jammer = JammerConfig{3, 40000, 70000};
  CHECK(jammed_bands_at(50000, cfg) == std::set<int>{3});
  CHECK(jammed_bands_at(40000, cfg) == std::set<int>{3});
  CHECK(jammed_bands_at(70000, cfg) == std::set<int>{3});
  CHECK(jammed_bands_at(70001, cfg).empty());
  CHECK(jammed_bands_at(39999, cfg).empty());
}

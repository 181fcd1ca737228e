#include <random>

#include "doctest.h"
#include "ficfl/multiset.hpp"

using namespace ficfl;

namespace {

SymbolTable pq_table() {
  SymbolTable t;
  t.intern("p");
  t.intern("q");
  return t;
}

Multiset random_multiset(std::mt19937& rng, int symbols, int max_count) {
  Multiset m;
  std::uniform_int_distribution<int> d(0, max_count);
  for (int s = 0; s < symbols; ++s) m.set(s, d(rng));
  return m;
}

}  // namespace

TEST_CASE("msum is pointwise with empty identity") {
  auto t = pq_table();
  int p = t.at("p"), q = t.at("q");
  CHECK(msum(Multiset::of({p, p}), Multiset::of({p, q})) ==
        Multiset::of({p, p, p, q}));
  Multiset m = Multiset::of({p, q, q});
  CHECK(msum(m, Multiset{}) == m);
  SymbolTable t3;
  int q1 = t3.intern("q1");
  t3.intern("q2");
  int q3 = t3.intern("q3");
  CHECK(msum(Multiset::of({q1, q1, q3}), Multiset::of({q3})) ==
        Multiset::of({q1, q1, q3, q3}));
}

TEST_CASE("mdiff is partial pointwise subtraction") {
  auto t = pq_table();
  int p = t.at("p"), q = t.at("q");
  CHECK(mdiff(Multiset::of({p, p, q}), Multiset::of({p})) == Multiset::of({p, q}));
  Multiset m = Multiset::of({p, p});
  CHECK(mdiff(m, Multiset{}) == m);
  CHECK_THROWS_AS(mdiff(Multiset::of({p}), Multiset::of({q})), NotSubsumed);
  CHECK(!mdiff_opt(Multiset::of({p}), Multiset::of({q})));
}

TEST_CASE("mleq") {
  auto t = pq_table();
  int p = t.at("p"), q = t.at("q");
  CHECK(mleq(Multiset{}, Multiset::of({p, q})));
  CHECK(mleq(Multiset{}, Multiset{}));
  CHECK(mleq(Multiset::of({p, q}), Multiset::of({p, p, q})));
  CHECK(!mleq(Multiset::of({p, p}), Multiset::of({p, q})));
}

TEST_CASE("mleq agrees with mdiff success, and round trip") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 500; ++trial) {
    Multiset a = random_multiset(rng, 4, 3);
    Multiset b = random_multiset(rng, 4, 3);
    CHECK(mleq(a, b) == mdiff_opt(b, a).has_value());
    if (mleq(b, a)) CHECK(msum(mdiff(a, b), b) == a);
  }
}

TEST_CASE("canonical form: zero counts never stored") {
  Multiset m;
  m.set(0, 2);
  m.set(0, 0);
  CHECK(m == Multiset{});
  m.add(1, 3);
  m.add(1, -3);
  CHECK(m.empty());
  CHECK_THROWS_AS(m.set(0, -1), Error);
}

TEST_CASE("project keeps an order-preserving subsequence") {
  // word p1 t2 c1 t1 over symbols {0:p1, 1:t2, 2:c1, 3:t1}
  Word w{0, 1, 2, 3};
  CHECK(project(w, {1, 3}) == Word{1, 3});
  CHECK(project(Word{}, {1, 3}) == Word{});
  CHECK(project(w, {0, 1, 2, 3}) == w);
}

TEST_CASE("project idempotence and concatenation distribution") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> sym(0, 5);
  std::uniform_int_distribution<int> len(0, 8);
  for (int trial = 0; trial < 200; ++trial) {
    Word u, v;
    for (int i = len(rng); i > 0; --i) u.push_back(sym(rng));
    for (int i = len(rng); i > 0; --i) v.push_back(sym(rng));
    std::set<int> theta;
    for (int i = sym(rng); i > 0; --i) theta.insert(sym(rng));
    CHECK(project(project(u, theta), theta) == project(u, theta));
    Word uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    Word cat = project(u, theta);
    Word pv = project(v, theta);
    cat.insert(cat.end(), pv.begin(), pv.end());
    CHECK(project(uv, theta) == cat);
  }
}

TEST_CASE("multiset literal round trip") {
  auto t = pq_table();
  int p = t.at("p"), q = t.at("q");
  Multiset m;
  m.set(p, 2);
  m.set(q, 1);
  CHECK(to_literal(m, t) == "{p:2, q:1}");
  CHECK(parse_literal("{p:2, q:1}", t) == m);
  CHECK(parse_literal("{p, p, q}", t) == m);
  CHECK(parse_literal("{}", t) == Multiset{});
  CHECK(to_literal(Multiset{}, t) == "{}");
  CHECK_THROWS_AS(parse_literal("{p:", t), Error);
  CHECK_THROWS_AS(parse_literal("{zz}", t), Error);
}

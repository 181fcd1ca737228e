#include "ficfl/generators.hpp"

namespace ficfl {

Grammar random_restricted_grammar(std::mt19937& rng, int max_vars,
                                  int max_prods, int num_terminals) {
  Grammar g;
  std::uniform_int_distribution<int> nvars(1, max_vars);
  int vars = nvars(rng);
  for (int v = 0; v < vars; ++v) g.variables.intern("V" + std::to_string(v));
  for (int t = 0; t < num_terminals; ++t)
    g.terminals.intern(std::string(1, static_cast<char>('a' + t)));

  std::uniform_int_distribution<int> nprods(1, max_prods);
  std::uniform_int_distribution<int> var(0, vars - 1);
  std::uniform_int_distribution<int> term(0, num_terminals - 1);
  std::uniform_int_distribution<int> shape(0, 9);
  int prods = nprods(rng);
  for (int i = 0; i < prods; ++i) {
    int head = var(rng);
    int s = shape(rng);
    if (s < 4)
      g.add(head, {{false, var(rng)}, {false, var(rng)}});
    else if (s < 9)
      g.add(head, {{true, term(rng)}});
    else
      g.add(head, {});
  }
  return g;
}

PetriNet random_conservative_net(std::mt19937& rng, int places,
                                 int num_transitions, int tokens) {
  PetriNet net;
  std::uniform_int_distribution<int> place(0, places - 1);
  for (int p = 0; p < places; ++p) net.add_place("s" + std::to_string(p));
  for (int i = 0; i < tokens; ++i) net.initial.add(place(rng));
  std::uniform_int_distribution<int> arcs(1, 2);
  for (int t = 0; t < num_transitions; ++t) {
    Transition tr;
    tr.name = "t" + std::to_string(t);
    int n = arcs(rng);
    for (int i = 0; i < n; ++i) {
      tr.in.add(place(rng));
      tr.out.add(place(rng));
    }
    net.add_transition(std::move(tr));
  }
  return net;
}

PetriNet random_weak_net(std::mt19937& rng, int places, int num_transitions,
                         int tokens) {
  PetriNet net = random_conservative_net(rng, places, num_transitions, tokens);
  // Each transition tests a prefix of the place order; prefixes are totally
  // ordered by inclusion, so the identity level assignment is weak.
  std::uniform_int_distribution<int> prefix(0, places);
  for (auto& t : net.transitions) {
    int n = prefix(rng);
    for (int p = 0; p < n; ++p) t.zero.insert(p);
  }
  return net;
}

}  // namespace ficfl

#include "oblicalc/oracle.hpp"

#include <algorithm>
#include <map>

namespace oblicalc {

std::uint64_t count_time_monotone(std::size_t alphabet, std::size_t grid, std::size_t depth) {
  std::uint64_t total = 0;
  std::uint64_t power = 1;
  for (std::size_t k = 0; k <= depth; ++k) {
    // C(grid + k - 1, k) non-decreasing time assignments of length k
    std::uint64_t choose = 1;
    for (std::size_t i = 1; i <= k; ++i) choose = choose * (grid + i - 1) / i;
    if (grid == 0 && k > 0) choose = 0;
    total += power * choose;
    power *= alphabet;
  }
  return total;
}

std::vector<GroundAction> ground_alphabet(const Theory& theory, const std::vector<TimePoint>& grid) {
  std::vector<GroundAction> out;
  for (const auto& atom : theory.alphabet)
    for (TimePoint t : grid) out.push_back({atom.name, atom.args, t});
  return out;
}

WorldSet enumerate_situations(TimePoint epoch, const std::vector<GroundAction>& alphabet, std::size_t depth,
                              std::uint64_t budget) {
  if (depth > kMaxOracleDepth)
    throw BudgetExceeded("depth " + std::to_string(depth) + " exceeds the limit of " +
                         std::to_string(kMaxOracleDepth));
  WorldSet ws;
  ws.situations.push_back(Situation::initial(epoch));
  std::size_t frontier = 0;
  for (std::size_t k = 0; k < depth; ++k) {
    const std::size_t end = ws.situations.size();
    for (std::size_t i = frontier; i < end; ++i) {
      for (const auto& a : alphabet) {
        if (a.time < ws.situations[i].start()) continue;
        if (ws.situations.size() >= budget)
          throw BudgetExceeded("more than " + std::to_string(budget) + " situations");
        ws.situations.push_back(ws.situations[i].then(a));
      }
    }
    frontier = end;
  }
  return ws;
}

std::set<Formula> store_at(const Theory& theory, const Situation& s) {
  const auto acts = s.actions();
  const std::size_t n = acts.size();
  std::vector<TimePoint> starts{s.epoch()};
  for (const auto& a : acts) starts.push_back(a.time);

  std::set<Formula> store;
  for (const auto& decl : theory.obligations) {
    const ActionDecl* trig = theory.find_action(decl.trigger);
    for (std::size_t j = 1; j <= n; ++j) {
      const GroundAction& a = acts[j - 1];
      if (a.functor != decl.trigger) continue;
      if (decl.type == ObligationType::Punctual && j != n) continue;
      const std::int64_t t2 = a.time.value() + decl.window.value();
      bool live = true;
      for (std::size_t i = j + 1; i <= n && live; ++i)
        if (starts[i].value() > t2) live = false;
      for (std::size_t i = j + 1; i < n && live; ++i) {
        const GroundAction& b = acts[i - 1];
        if (std::find(decl.stoppers.begin(), decl.stoppers.end(), b.functor) == decl.stoppers.end()) continue;
        const ActionDecl* stop = theory.find_action(b.functor);
        bool same = true;
        for (std::size_t x = 0; x < b.args.size(); ++x)
          for (std::size_t y = 0; y < a.args.size(); ++y)
            if (stop->sig.params[x].name == trig->sig.params[y].name && b.args[x] != a.args[y]) same = false;
        if (same) live = false;
      }
      if (!live) continue;
      std::map<std::string, Term> subst;
      for (std::size_t y = 0; y < a.args.size(); ++y)
        subst.emplace(trig->sig.params[y].name, Term::constant(a.args[y]));
      store.insert(substitute(decl.obliged, subst));
    }
  }
  return store;
}

bool modal_oblg(const Evaluator& ev, const WorldSet& ws, const std::set<Formula>& store, const Formula& phi) {
  for (const auto& w : ws.situations) {
    const bool accessible =
        std::all_of(store.begin(), store.end(), [&](const Formula& psi) { return ev.holds(psi, w); });
    if (accessible && !ev.holds(phi, w)) return false;
  }
  return true;
}

EquivalenceReport check_equivalence(std::shared_ptr<const Theory> theory, const OracleOptions& options) {
  if (theory->alphabet.size() > kMaxOracleAlphabet)
    throw BudgetExceeded("alphabet of " + std::to_string(theory->alphabet.size()) + " actions exceeds the limit of " +
                         std::to_string(kMaxOracleAlphabet));
  WorldSet ws = enumerate_situations(theory->epoch, ground_alphabet(*theory, options.grid), options.depth,
                                     options.budget);
  Evaluator ev(theory);
  if (options.executable_only)
    std::erase_if(ws.situations, [&](const Situation& s) { return !executable(ev, s); });

  EquivalenceReport report;
  report.worlds = ws.situations.size();

  std::vector<std::set<Formula>> monitored;
  std::vector<std::set<Formula>> declared;
  std::set<Formula> candidates;
  for (const auto& s : ws.situations) {
    Monitor m(ev, MonitorOptions{!options.mutate_no_discharge});
    for (const auto& a : s.actions()) m.advance(a);
    monitored.push_back(m.in_force(m.length()));
    declared.push_back(store_at(*theory, s));
    candidates.insert(monitored.back().begin(), monitored.back().end());
    candidates.insert(declared.back().begin(), declared.back().end());
  }

  // Worlds collapse to their truth pattern over the candidate formulas.
  const std::vector<Formula> phis(candidates.begin(), candidates.end());
  std::set<std::vector<bool>> patterns;
  for (const auto& w : ws.situations) {
    std::vector<bool> bits;
    for (const auto& phi : phis) bits.push_back(ev.holds(phi, w));
    patterns.insert(std::move(bits));
  }

  for (std::size_t i = 0; i < ws.situations.size(); ++i) {
    std::vector<bool> required(phis.size(), false);
    for (std::size_t f = 0; f < phis.size(); ++f) required[f] = declared[i].count(phis[f]) > 0;
    std::vector<bool> entailed(phis.size(), true);
    bool satisfiable = false;
    for (const auto& bits : patterns) {
      bool accessible = true;
      for (std::size_t f = 0; f < phis.size() && accessible; ++f)
        if (required[f] && !bits[f]) accessible = false;
      if (!accessible) continue;
      satisfiable = true;
      for (std::size_t f = 0; f < phis.size(); ++f) entailed[f] = entailed[f] && bits[f];
    }
    if (!satisfiable) {
      ++report.unsatisfiable;
      continue;
    }
    for (std::size_t f = 0; f < phis.size(); ++f) {
      const bool store = monitored[i].count(phis[f]) > 0;
      if (!store && !required[f]) continue;
      ++report.checks;
      if (store != entailed[f]) report.discrepancies.push_back({ws.situations[i], phis[f].str(), store, entailed[f]});
    }
    if (monitored[i].size() > 1) {
      ++report.checks;
      bool conj = true;
      for (std::size_t f = 0; f < phis.size(); ++f)
        if (monitored[i].count(phis[f])) conj = conj && entailed[f];
      if (!conj) {
        std::string name;
        for (const auto& phi : monitored[i]) name += (name.empty() ? "" : " and ") + phi.str();
        report.discrepancies.push_back({ws.situations[i], name, true, false});
      }
    }
  }
  return report;
}

}  // namespace oblicalc

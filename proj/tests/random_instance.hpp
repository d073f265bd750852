#pragma once

#include <random>

#include "alloysmt/oracle.hpp"

namespace testing_support {

/// A random well-formed instance: top-level sizes in 1..bound, subtype memberships drawn
/// by rejection, relation rows drawn per multiplicity over the restricted domain.
inline alloysmt::Instance random_instance(const alloysmt::TypeHierarchy& h,
                                          const std::vector<alloysmt::RelationSchema>& rels,
                                          int bound, std::mt19937& rng) {
  using namespace alloysmt;
  Instance inst;
  std::vector<TypeId> atom_top;
  for (TypeId t : h.tops()) {
    const int n = std::uniform_int_distribution<int>(1, bound)(rng);
    for (int i = 0; i < n; ++i) {
      inst.atom_names.push_back(h.name(t) + "$" + std::to_string(i));
      atom_top.push_back(t);
    }
  }
  inst.atoms = static_cast<int>(atom_top.size());
  inst.types.assign(static_cast<std::size_t>(h.size()), TupleSet(1, inst.atoms));
  std::bernoulli_distribution coin(0.5);
  for (int a = 0; a < inst.atoms; ++a) {
    const TypeId top = atom_top[static_cast<std::size_t>(a)];
    const auto subs = h.descendants(top);
    while (true) {
      std::vector<bool> in(static_cast<std::size_t>(h.size()), false);
      in[static_cast<std::size_t>(top)] = true;
      for (TypeId s : subs) in[static_cast<std::size_t>(s)] = coin(rng);
      bool ok = true;
      for (TypeId s : subs) {
        if (in[static_cast<std::size_t>(s)] && !in[static_cast<std::size_t>(h.info(s).parent)]) ok = false;
      }
      for (TypeId t = 0; t < h.size() && ok; ++t) {
        if (!in[static_cast<std::size_t>(t)]) continue;
        int k = 0;
        for (TypeId c : h.extends_children(t)) k += in[static_cast<std::size_t>(c)] ? 1 : 0;
        if (k > 1 || (h.is_exhaustive(t) && k != 1)) ok = false;
      }
      if (!ok) continue;
      for (TypeId t = 0; t < h.size(); ++t) {
        if (in[static_cast<std::size_t>(t)]) inst.types[static_cast<std::size_t>(t)].insert({a});
      }
      break;
    }
  }
  for (const auto& r : rels) {
    TupleSet val(r.arity(), inst.atoms);
    std::vector<std::vector<int>> domain{{}};
    for (int c = 0; c + 1 < r.arity(); ++c) {
      std::vector<std::vector<int>> next;
      for (const auto& pre : domain) {
        for (const auto& t : inst.types[static_cast<std::size_t>(r.columns[static_cast<std::size_t>(c)])].tuples()) {
          const int restr = r.restriction[static_cast<std::size_t>(c)];
          if (restr >= 0 && !inst.relations[static_cast<std::size_t>(restr)].contains({pre[0], t[0]})) continue;
          auto d = pre;
          d.push_back(t[0]);
          next.push_back(d);
        }
      }
      domain = next;
    }
    std::vector<int> range;
    for (const auto& t : inst.types[static_cast<std::size_t>(r.range())].tuples()) range.push_back(t[0]);
    for (const auto& d : domain) {
      std::vector<int> pick;
      if (r.functional()) {
        const bool skip = r.multiplicity == Multiplicity::Lone && coin(rng);
        if (!skip && !range.empty())
          pick.push_back(range[std::uniform_int_distribution<std::size_t>(0, range.size() - 1)(rng)]);
      } else {
        for (int a : range) {
          if (coin(rng)) pick.push_back(a);
        }
        if (r.multiplicity == Multiplicity::Some && pick.empty() && !range.empty())
          pick.push_back(range[std::uniform_int_distribution<std::size_t>(0, range.size() - 1)(rng)]);
      }
      for (int a : pick) {
        auto t = d;
        t.push_back(a);
        val.insert(t);
      }
    }
    inst.relations.push_back(std::move(val));
  }
  return inst;
}

}  // namespace testing_support

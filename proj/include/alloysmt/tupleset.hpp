#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace alloysmt {

/// A set of k-tuples over atoms 0..n-1, stored as a dense bitset of n^k bits.
/// Tuple (a0, ..., ak-1) has index a0*n^(k-1) + ... + ak-1.
class TupleSet {
 public:
  TupleSet() = default;
  TupleSet(int arity, int atoms);

  static TupleSet singleton(int atoms, int atom);
  static TupleSet of(int arity, int atoms, const std::vector<std::vector<int>>& tuples);

  int arity() const { return arity_; }
  int atoms() const { return n_; }
  std::size_t capacity() const { return cap_; }

  bool contains(const std::vector<int>& tuple) const;
  bool contains_index(std::size_t idx) const { return (bits_[idx >> 6] >> (idx & 63)) & 1; }
  void insert(const std::vector<int>& tuple);
  void insert_index(std::size_t idx) { bits_[idx >> 6] |= std::uint64_t{1} << (idx & 63); }
  void erase(const std::vector<int>& tuple);
  void erase_index(std::size_t idx) { bits_[idx >> 6] &= ~(std::uint64_t{1} << (idx & 63)); }
  void clear();

  bool empty() const;
  std::size_t size() const;
  /// The atom of a singleton unary set, or -1.
  int scalar() const;

  bool operator==(const TupleSet& o) const;
  bool operator!=(const TupleSet& o) const { return !(*this == o); }
  bool subset_of(const TupleSet& o) const;

  TupleSet unite(const TupleSet& o) const;
  TupleSet intersect(const TupleSet& o) const;
  TupleSet minus(const TupleSet& o) const;
  /// Relational join on the last column of this and the first column of `o`.
  TupleSet join(const TupleSet& o) const;
  TupleSet product(const TupleSet& o) const;
  /// Least transitive relation containing this (binary only); Warshall.
  TupleSet closure() const;
  static TupleSet identity(const TupleSet& unary);

  std::vector<int> tuple_at(std::size_t idx) const;
  std::size_t index_of(const std::vector<int>& tuple) const;
  std::vector<std::vector<int>> tuples() const;

  template <class F>
  void for_each_index(F&& f) const {
    for (std::size_t w = 0; w < bits_.size(); ++w) {
      std::uint64_t word = bits_[w];
      while (word) {
        const int b = __builtin_ctzll(word);
        f(w * 64 + static_cast<std::size_t>(b));
        word &= word - 1;
      }
    }
  }

 private:
  int arity_ = 0;
  int n_ = 0;
  std::size_t cap_ = 0;
  std::vector<std::uint64_t> bits_;

  void check_compatible(const TupleSet& o) const;
};

}  // namespace alloysmt

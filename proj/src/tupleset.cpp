#include "alloysmt/tupleset.hpp"

#include <stdexcept>

namespace alloysmt {

namespace {

std::size_t power(int n, int k) {
  std::size_t p = 1;
  for (int i = 0; i < k; ++i) p *= static_cast<std::size_t>(n);
  return p;
}

}  // namespace

TupleSet::TupleSet(int arity, int atoms)
    : arity_(arity), n_(atoms), cap_(power(atoms, arity)), bits_((cap_ + 63) / 64, 0) {}

TupleSet TupleSet::singleton(int atoms, int atom) {
  TupleSet s(1, atoms);
  s.insert_index(static_cast<std::size_t>(atom));
  return s;
}

TupleSet TupleSet::of(int arity, int atoms, const std::vector<std::vector<int>>& tuples) {
  TupleSet s(arity, atoms);
  for (const auto& t : tuples) s.insert(t);
  return s;
}

std::size_t TupleSet::index_of(const std::vector<int>& tuple) const {
  if (static_cast<int>(tuple.size()) != arity_) throw std::invalid_argument("tuple arity mismatch");
  std::size_t idx = 0;
  for (int a : tuple) {
    if (a < 0 || a >= n_) throw std::out_of_range("atom outside universe");
    idx = idx * static_cast<std::size_t>(n_) + static_cast<std::size_t>(a);
  }
  return idx;
}

std::vector<int> TupleSet::tuple_at(std::size_t idx) const {
  std::vector<int> t(static_cast<std::size_t>(arity_));
  for (int i = arity_ - 1; i >= 0; --i) {
    t[static_cast<std::size_t>(i)] = static_cast<int>(idx % static_cast<std::size_t>(n_));
    idx /= static_cast<std::size_t>(n_);
  }
  return t;
}

bool TupleSet::contains(const std::vector<int>& tuple) const { return contains_index(index_of(tuple)); }
void TupleSet::insert(const std::vector<int>& tuple) { insert_index(index_of(tuple)); }
void TupleSet::erase(const std::vector<int>& tuple) { erase_index(index_of(tuple)); }

void TupleSet::clear() {
  for (auto& w : bits_) w = 0;
}

bool TupleSet::empty() const {
  for (auto w : bits_) {
    if (w) return false;
  }
  return true;
}

std::size_t TupleSet::size() const {
  std::size_t c = 0;
  for (auto w : bits_) c += static_cast<std::size_t>(__builtin_popcountll(w));
  return c;
}

int TupleSet::scalar() const {
  if (arity_ != 1 || size() != 1) return -1;
  int out = -1;
  for_each_index([&](std::size_t i) { out = static_cast<int>(i); });
  return out;
}

void TupleSet::check_compatible(const TupleSet& o) const {
  if (arity_ != o.arity_ || n_ != o.n_) throw std::invalid_argument("incompatible tuple sets");
}

bool TupleSet::operator==(const TupleSet& o) const {
  return arity_ == o.arity_ && n_ == o.n_ && bits_ == o.bits_;
}

bool TupleSet::subset_of(const TupleSet& o) const {
  check_compatible(o);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] & ~o.bits_[i]) return false;
  }
  return true;
}

TupleSet TupleSet::unite(const TupleSet& o) const {
  check_compatible(o);
  TupleSet r = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) r.bits_[i] |= o.bits_[i];
  return r;
}

TupleSet TupleSet::intersect(const TupleSet& o) const {
  check_compatible(o);
  TupleSet r = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) r.bits_[i] &= o.bits_[i];
  return r;
}

TupleSet TupleSet::minus(const TupleSet& o) const {
  check_compatible(o);
  TupleSet r = *this;
  for (std::size_t i = 0; i < bits_.size(); ++i) r.bits_[i] &= ~o.bits_[i];
  return r;
}

TupleSet TupleSet::join(const TupleSet& o) const {
  if (n_ != o.n_) throw std::invalid_argument("join over different universes");
  const int k = arity_ + o.arity_ - 2;
  if (k < 1) throw std::invalid_argument("join yields arity below one");
  TupleSet r(k, n_);
  const std::size_t tail = power(n_, o.arity_ - 1);
  for_each_index([&](std::size_t a) {
    const std::size_t last = a % static_cast<std::size_t>(n_);
    const std::size_t prefix = a / static_cast<std::size_t>(n_);
    for (std::size_t j = 0; j < tail; ++j) {
      if (o.contains_index(last * tail + j)) r.insert_index(prefix * tail + j);
    }
  });
  return r;
}

TupleSet TupleSet::product(const TupleSet& o) const {
  if (n_ != o.n_) throw std::invalid_argument("product over different universes");
  TupleSet r(arity_ + o.arity_, n_);
  const std::size_t scale = o.cap_;
  for_each_index([&](std::size_t a) {
    o.for_each_index([&](std::size_t b) { r.insert_index(a * scale + b); });
  });
  return r;
}

TupleSet TupleSet::closure() const {
  if (arity_ != 2) throw std::invalid_argument("closure of a non-binary relation");
  TupleSet r = *this;
  const std::size_t n = static_cast<std::size_t>(n_);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!r.contains_index(i * n + k)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (r.contains_index(k * n + j)) r.insert_index(i * n + j);
      }
    }
  }
  return r;
}

TupleSet TupleSet::identity(const TupleSet& unary) {
  TupleSet r(2, unary.n_);
  unary.for_each_index([&](std::size_t a) { r.insert_index(a * static_cast<std::size_t>(unary.n_) + a); });
  return r;
}

std::vector<std::vector<int>> TupleSet::tuples() const {
  std::vector<std::vector<int>> out;
  for_each_index([&](std::size_t i) { out.push_back(tuple_at(i)); });
  return out;
}

}  // namespace alloysmt

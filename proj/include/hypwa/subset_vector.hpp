#pragma once

// Finitely supported vectors on the finite subsets of the vertex set, and
// the subset-cube vectors xi~+_S, xi~-_S, xi+_S, xi-_S built on them.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "hypwa/error.hpp"
#include "hypwa/graph.hpp"

namespace hypwa {

/// A finite vertex subset in canonical (strictly increasing) form.
class SubsetKey {
 public:
  SubsetKey() = default;
  SubsetKey(std::initializer_list<VertexId> ids) : ids_(ids) { canonicalize(); }
  explicit SubsetKey(std::vector<VertexId> ids) : ids_(std::move(ids)) { canonicalize(); }

  std::span<const VertexId> ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(VertexId v) const { return std::binary_search(ids_.begin(), ids_.end(), v); }

  bool subset_of(const SubsetKey& other) const {
    return std::includes(other.ids_.begin(), other.ids_.end(), ids_.begin(), ids_.end());
  }

  auto operator<=>(const SubsetKey&) const = default;

  std::string str() const {
    std::string s = "{";
    for (std::size_t i = 0; i < ids_.size(); ++i) s += (i ? "," : "") + std::to_string(ids_[i]);
    return s + "}";
  }

 private:
  void canonicalize() {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }
  std::vector<VertexId> ids_;
};

inline std::size_t intersection_size(const SubsetKey& a, const SubsetKey& b) {
  std::size_t count = 0;
  auto i = a.ids().begin(), j = b.ids().begin();
  while (i != a.ids().end() && j != b.ids().end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

namespace detail {
template <class T> struct is_complex : std::false_type {};
template <class T> struct is_complex<std::complex<T>> : std::true_type {};

template <class T> T conj_if(const T& v) {
  if constexpr (is_complex<T>::value) return std::conj(v);
  else return v;
}
}  // namespace detail

/// Finitely supported map SubsetKey -> Scalar without stored zeros.
/// inner(f, g) = sum conj(f(w)) g(w).
template <class Scalar>
class BasicSubsetVector {
 public:
  using Map = std::map<SubsetKey, Scalar>;

  BasicSubsetVector() = default;

  static BasicSubsetVector delta(const SubsetKey& key) {
    BasicSubsetVector v;
    v.set(key, Scalar(1));
    return v;
  }

  Scalar at(const SubsetKey& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? Scalar(0) : it->second;
  }

  void set(const SubsetKey& key, Scalar value) {
    if (value == Scalar(0)) entries_.erase(key);
    else entries_[key] = value;
  }

  void add(const SubsetKey& key, Scalar value) { set(key, at(key) + value); }

  const Map& entries() const { return entries_; }
  std::size_t support_size() const { return entries_.size(); }

  BasicSubsetVector& operator+=(const BasicSubsetVector& o) {
    for (const auto& [k, v] : o.entries_) add(k, v);
    return *this;
  }
  BasicSubsetVector& operator-=(const BasicSubsetVector& o) {
    for (const auto& [k, v] : o.entries_) add(k, -v);
    return *this;
  }
  friend BasicSubsetVector operator-(BasicSubsetVector a, const BasicSubsetVector& b) { return a -= b; }
  friend BasicSubsetVector operator+(BasicSubsetVector a, const BasicSubsetVector& b) { return a += b; }
  friend BasicSubsetVector operator*(Scalar s, BasicSubsetVector a) {
    if (s == Scalar(0)) return {};
    for (auto& [k, v] : a.entries_) v *= s;
    return a;
  }

  friend Scalar inner(const BasicSubsetVector& f, const BasicSubsetVector& g) {
    const auto& small = f.entries_.size() <= g.entries_.size() ? f.entries_ : g.entries_;
    const auto& large = f.entries_.size() <= g.entries_.size() ? g.entries_ : f.entries_;
    const bool f_small = &small == &f.entries_;
    Scalar acc(0);
    for (const auto& [k, v] : small) {
      auto it = large.find(k);
      if (it == large.end()) continue;
      acc += f_small ? detail::conj_if(v) * it->second : detail::conj_if(it->second) * v;
    }
    return acc;
  }

  Scalar norm2() const { return inner(*this, *this); }

  bool operator==(const BasicSubsetVector&) const = default;

 private:
  Map entries_;
};

using SubsetVector = BasicSubsetVector<std::complex<double>>;
using IntSubsetVector = BasicSubsetVector<std::int64_t>;

enum class XiSign { plus, minus };

inline XiSign opposite(XiSign s) { return s == XiSign::plus ? XiSign::minus : XiSign::plus; }

/// One factor xi~^{sign}_S (tilde) or xi^{sign}_S held symbolically.
struct XiFactor {
  SubsetKey set;
  XiSign sign = XiSign::plus;
  bool tilde = false;
};

inline constexpr std::size_t kDefaultXiCap = 20;

/// Materialized xi vector: xi~+_S(w) = [w in S], xi~-_S(w) = (-1)^|w| [w in S],
/// xi+_S = xi~+_S - delta_0, xi-_S = -(xi~-_S - delta_0).
inline IntSubsetVector xi_vector(const SubsetKey& s, XiSign sign, bool tilde, std::size_t cap = kDefaultXiCap) {
  if (s.size() > cap) {
    throw InputError("subset of size " + std::to_string(s.size()) + " exceeds the xi materialization cap " +
                     std::to_string(cap));
  }
  IntSubsetVector v;
  const auto ids = s.ids();
  const std::uint64_t count = 1ULL << ids.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    std::vector<VertexId> omega;
    for (std::size_t b = 0; b < ids.size(); ++b) {
      if (mask & (1ULL << b)) omega.push_back(ids[b]);
    }
    std::int64_t value = 1;
    if (sign == XiSign::minus && (omega.size() % 2 == 1)) value = -1;
    if (!tilde) {
      if (omega.empty()) continue;
      if (sign == XiSign::minus) value = -value;
    }
    v.set(SubsetKey(std::move(omega)), value);
  }
  return v;
}

inline IntSubsetVector xi_vector(const XiFactor& f, std::size_t cap = kDefaultXiCap) {
  return xi_vector(f.set, f.sign, f.tilde, cap);
}

/// <xi-_T, xi+_S> from the materialized vectors.
inline std::int64_t xi_inner(const SubsetKey& s, const SubsetKey& t, std::size_t cap = kDefaultXiCap) {
  return inner(xi_vector(t, XiSign::minus, false, cap), xi_vector(s, XiSign::plus, false, cap));
}

namespace detail {

// Every xi vector has the shape  w -> a [w = 0] + c sigma^|w| [0 != w in S].
struct XiShape {
  int a, c, sigma;
};

inline XiShape shape(XiSign sign, bool tilde) {
  if (tilde) return {1, 1, sign == XiSign::plus ? 1 : -1};
  return sign == XiSign::plus ? XiShape{0, 1, 1} : XiShape{0, -1, -1};
}

}  // namespace detail

/// Closed-form inner product of two xi vectors whose sets meet in `common`
/// elements: a_f a_g + c_f c_g ((1 + sigma_f sigma_g)^common - 1).
inline double xi_inner_closed(XiSign sign_f, bool tilde_f, XiSign sign_g, bool tilde_g, std::size_t common) {
  const auto f = detail::shape(sign_f, tilde_f);
  const auto g = detail::shape(sign_g, tilde_g);
  const int base = 1 + f.sigma * g.sigma;
  const double power = base == 0 ? (common == 0 ? 1.0 : 0.0) : std::ldexp(1.0, static_cast<int>(common));
  return f.a * g.a + f.c * g.c * (power - 1.0);
}

inline double xi_inner_closed(const XiFactor& f, const XiFactor& g) {
  return xi_inner_closed(f.sign, f.tilde, g.sign, g.tilde, intersection_size(f.set, g.set));
}

/// Exact integer version; throws when 2^common does not fit.
inline std::int64_t xi_inner_exact(const XiFactor& f, const XiFactor& g) {
  const std::size_t common = intersection_size(f.set, g.set);
  if (common > 61) throw InputError("xi inner product exceeds 64-bit range");
  const auto a = detail::shape(f.sign, f.tilde);
  const auto b = detail::shape(g.sign, g.tilde);
  const int base = 1 + a.sigma * b.sigma;
  const std::int64_t power = base == 0 ? (common == 0 ? 1 : 0) : (std::int64_t{1} << common);
  return a.a * b.a + a.c * b.c * (power - 1);
}

/// Ordered list of xi factors standing for their tensor product; inner
/// products factor through the list and nothing is materialized.
struct TensorVector {
  std::vector<XiFactor> factors;

  std::size_t rank() const { return factors.size(); }
};

inline double inner(const TensorVector& f, const TensorVector& g) {
  if (f.factors.size() != g.factors.size()) throw InputError("tensor vectors of different rank");
  double acc = 1.0;
  for (std::size_t i = 0; i < f.factors.size() && acc != 0.0; ++i) acc *= xi_inner_closed(f.factors[i], g.factors[i]);
  return acc;
}

inline double norm2(const TensorVector& f) { return inner(f, f); }

}  // namespace hypwa

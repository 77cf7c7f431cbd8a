#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "axf/logic.hpp"

namespace axf {

/// Finite, ordered set of objects. Tuples over the universe are encoded as
/// mixed-radix integers with the first argument most significant, so tuple
/// order coincides with lexicographic object order.
class Universe {
 public:
  explicit Universe(std::vector<std::string> objects) : objects_(std::move(objects)) {
    if (objects_.empty()) throw Error("universe", "a universe needs at least one object");
    for (std::size_t i = 0; i < objects_.size(); ++i)
      for (std::size_t j = i + 1; j < objects_.size(); ++j)
        if (objects_[i] == objects_[j]) throw Error("universe", "duplicate object '" + objects_[i] + "'");
  }

  /// The declared objects followed by generated ones (o1, o2, ...) up to `n`.
  static Universe padded(const std::vector<std::string>& declared, std::size_t n) {
    if (n < declared.size())
      throw Error("universe", "universe size " + std::to_string(n) + " is smaller than the " +
                                  std::to_string(declared.size()) + " declared objects");
    std::vector<std::string> objs = declared;
    for (std::size_t k = 1; objs.size() < n; ++k) {
      std::string name = "o" + std::to_string(k);
      if (std::find(objs.begin(), objs.end(), name) == objs.end()) objs.push_back(std::move(name));
    }
    return Universe(std::move(objs));
  }

  std::size_t size() const { return objects_.size(); }
  const std::vector<std::string>& objects() const { return objects_; }
  const std::string& name(std::size_t i) const { return objects_.at(i); }

  std::optional<std::size_t> index_of(std::string_view name) const {
    for (std::size_t i = 0; i < objects_.size(); ++i)
      if (objects_[i] == name) return i;
    return std::nullopt;
  }

  std::size_t tuple_count(std::size_t arity) const {
    std::size_t n = 1;
    for (std::size_t i = 0; i < arity; ++i) n *= objects_.size();
    return n;
  }

  std::size_t encode(std::span<const std::size_t> args) const {
    std::size_t code = 0;
    for (std::size_t a : args) code = code * objects_.size() + a;
    return code;
  }

  std::vector<std::size_t> decode(std::size_t code, std::size_t arity) const {
    std::vector<std::size_t> out(arity);
    for (std::size_t i = arity; i-- > 0;) {
      out[i] = code % objects_.size();
      code /= objects_.size();
    }
    return out;
  }

  friend bool operator==(const Universe&, const Universe&) = default;

 private:
  std::vector<std::string> objects_;
};

using Signature = std::vector<Predicate>;

/// Closed-world truth assignment to the ground atoms of the covered
/// predicates. A basic state covers the basic predicates only; an extended
/// state covers every predicate of its signature.
class TruthAssignment {
 public:
  TruthAssignment(std::shared_ptr<const Signature> signature, std::shared_ptr<const Universe> universe)
      : signature_(std::move(signature)), universe_(std::move(universe)), bits_(signature_->size()),
        covered_(signature_->size(), false) {}

  const Signature& signature() const { return *signature_; }
  const std::shared_ptr<const Signature>& signature_ptr() const { return signature_; }
  const Universe& universe() const { return *universe_; }
  const std::shared_ptr<const Universe>& universe_ptr() const { return universe_; }

  std::optional<std::size_t> predicate_index(std::string_view name) const {
    for (std::size_t i = 0; i < signature_->size(); ++i)
      if ((*signature_)[i].name == name) return i;
    return std::nullopt;
  }

  void cover(std::size_t pred) {
    if (covered_.at(pred)) return;
    covered_[pred] = true;
    bits_[pred].assign(universe_->tuple_count((*signature_)[pred].arity), 0);
  }

  void cover_kind(PredicateKind kind) {
    for (std::size_t p = 0; p < signature_->size(); ++p)
      if ((*signature_)[p].kind == kind) cover(p);
  }

  bool covers(std::size_t pred) const { return covered_.at(pred); }

  bool get(std::size_t pred, std::size_t code) const { return bits_[pred][code] != 0; }
  void set(std::size_t pred, std::size_t code, bool value = true) { bits_[pred][code] = value ? 1 : 0; }

  const std::vector<std::uint8_t>& bits(std::size_t pred) const { return bits_.at(pred); }
  std::vector<std::uint8_t>& bits(std::size_t pred) { return bits_.at(pred); }

  bool holds(std::string_view pred, std::span<const std::size_t> args) const {
    auto p = predicate_index(pred);
    if (!p || !covered_[*p]) throw Error("state", "predicate '" + std::string(pred) + "' is not covered by the state");
    if (args.size() != (*signature_)[*p].arity) throw Error("arity", "wrong number of arguments for " + std::string(pred));
    return get(*p, universe_->encode(args));
  }

  /// Convenience lookup by object names.
  bool holds(std::string_view pred, const std::vector<std::string>& args) const {
    std::vector<std::size_t> idx;
    for (const auto& a : args) {
      auto i = universe_->index_of(a);
      if (!i) throw Error("unknown-object", "object '" + a + "' is not in the universe");
      idx.push_back(*i);
    }
    return holds(pred, idx);
  }

  std::string atom_name(std::size_t pred, std::size_t code) const {
    const Predicate& p = (*signature_)[pred];
    std::string s = p.name + "(";
    auto args = universe_->decode(code, p.arity);
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) s += ',';
      s += universe_->name(args[i]);
    }
    return s + ")";
  }

  /// True atoms of the covered predicates matching `filter`, in signature
  /// order and then tuple order.
  std::vector<std::string> true_atoms(std::optional<PredicateKind> filter = std::nullopt) const {
    std::vector<std::string> out;
    for (std::size_t p = 0; p < signature_->size(); ++p) {
      if (!covered_[p] || (filter && (*signature_)[p].kind != *filter)) continue;
      for (std::size_t c = 0; c < bits_[p].size(); ++c)
        if (bits_[p][c]) out.push_back(atom_name(p, c));
    }
    return out;
  }

  std::size_t count_true(std::size_t pred) const {
    return static_cast<std::size_t>(std::count(bits_[pred].begin(), bits_[pred].end(), std::uint8_t{1}));
  }

  friend bool operator==(const TruthAssignment& a, const TruthAssignment& b) {
    return *a.signature_ == *b.signature_ && *a.universe_ == *b.universe_ && a.covered_ == b.covered_ &&
           a.bits_ == b.bits_;
  }

 private:
  std::shared_ptr<const Signature> signature_;
  std::shared_ptr<const Universe> universe_;
  std::vector<std::vector<std::uint8_t>> bits_;
  std::vector<bool> covered_;
};

/// An all-false basic state for `program` over `universe`.
inline TruthAssignment empty_basic_state(const AxiomProgram& program, const Universe& universe) {
  TruthAssignment s(std::make_shared<const Signature>(program.signature), std::make_shared<const Universe>(universe));
  s.cover_kind(PredicateKind::basic);
  return s;
}

}  // namespace axf

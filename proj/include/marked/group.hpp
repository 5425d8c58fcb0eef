#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "marked/errors.hpp"
#include "marked/words.hpp"

namespace marked {

/// An element of a marked group in the owning engine's canonical byte form.
/// Two elements of the same group are equal iff their bytes are identical;
/// the identity always has empty bytes.
struct GroupElement {
  std::string bytes;

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.bytes == b.bytes;
  }
  friend bool operator<(const GroupElement& a, const GroupElement& b) {
    return a.bytes < b.bytes;
  }
  bool is_identity() const { return bytes.empty(); }
};

/// A finite presentation <generators | relators>.
struct FinitePresentation {
  std::vector<std::string> generators;
  std::vector<Word> relators;
};

/// Engine interface: canonical forms and exact arithmetic for one group.
/// Engines are immutable after construction and freely shareable; every
/// operation is a pure function of (engine, input).
class Engine {
 public:
  virtual ~Engine() = default;

  virtual const std::vector<std::string>& generators() const = 0;
  virtual std::string kind() const = 0;

  virtual GroupElement identity() const { return GroupElement{}; }

  /// Right-multiply a canonical element by one generator letter.
  virtual GroupElement apply(const GroupElement& g, Letter l) const = 0;

  virtual GroupElement multiply(const GroupElement& a, const GroupElement& b) const = 0;
  virtual GroupElement inverse(const GroupElement& a) const = 0;

  virtual bool finite() const { return false; }
  virtual std::uint64_t order() const {
    throw NotApplicable(kind() + " engine: group not known to be finite");
  }

  /// Relators of a defining presentation, when the engine has one.
  virtual const std::vector<Word>* relators() const { return nullptr; }

  /// Some word in the generators mapping onto the element (not necessarily
  /// geodesic). Not every engine supports this.
  virtual Word element_word(const GroupElement& g) const {
    (void)g;
    throw NotApplicable(kind() + " engine: element_word unsupported");
  }
};

/// A group paired with its ordered generating tuple: all quantities in this
/// library depend on the marking, not just the group.
class MarkedGroup {
 public:
  MarkedGroup() = default;
  explicit MarkedGroup(std::shared_ptr<const Engine> engine) : engine_(std::move(engine)) {}

  const Engine& engine() const { return *engine_; }
  bool valid() const { return engine_ != nullptr; }

  const std::vector<std::string>& generators() const { return engine_->generators(); }
  size_t rank() const { return engine_->generators().size(); }
  std::string kind() const { return engine_->kind(); }

  GroupElement identity() const { return engine_->identity(); }

  GroupElement evaluate(const Word& w) const {
    GroupElement g = engine_->identity();
    const int r = static_cast<int>(rank());
    for (const Letter& l : w) {
      if (l.gen < 0 || l.gen >= r) {
        throw ConfigError("letter index " + std::to_string(l.gen) +
                          " out of range for group of rank " + std::to_string(r));
      }
      g = engine_->apply(g, l);
    }
    return g;
  }

  bool is_identity(const Word& w) const { return evaluate(w).is_identity(); }

  GroupElement multiply(const GroupElement& a, const GroupElement& b) const {
    return engine_->multiply(a, b);
  }
  GroupElement inverse(const GroupElement& a) const { return engine_->inverse(a); }

  GroupElement generator(size_t i) const {
    return engine_->apply(engine_->identity(), Letter{static_cast<int>(i), +1});
  }

  Word parse(const std::string& text) const {
    return WordParser(generators()).parse(text);
  }
  std::string format(const Word& w) const { return format_word(w, generators()); }

  /// Pointer identity of engines stands in for group identity.
  bool same_group(const MarkedGroup& other) const { return engine_ == other.engine_; }

 private:
  std::shared_ptr<const Engine> engine_;
};

}  // namespace marked

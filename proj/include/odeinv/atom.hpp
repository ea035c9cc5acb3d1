#pragma once

#include <cstdint>
#include <memory>
#include <string>

namespace odeinv {

class RatFunc;

/// Coordinate directions for partial differentiation.
enum class Dir : uint8_t { X = 0, Y = 1 };

enum class AtomKind : uint8_t { VarX = 0, VarY = 1, Opaque = 2, Func = 3 };

/// An atom is an indivisible multiplicand of the polynomial layer: a
/// coordinate variable, an opaque function symbol carrying a formal
/// partial-derivative multi-index, or an elementary function applied to a
/// rational expression (treated as opaque by the rational normal form).
///
/// Atoms are interned: equal atoms are pointer-equal, and `key` induces the
/// total order x < y < opaque symbols (by name, then multi-index) < function
/// applications (by function name, then argument).
struct AtomData {
  AtomKind kind;
  std::string name;  // opaque-symbol or function name; empty for variables
  int px = 0;        // d/dx count of the multi-index (opaque only)
  int py = 0;        // d/dy count
  std::shared_ptr<const RatFunc> arg;  // function argument (Func only)
  std::string key;   // canonical sort key
};

using AtomPtr = std::shared_ptr<const AtomData>;

const AtomPtr& atom_x();
const AtomPtr& atom_y();
const AtomPtr& atom_var(Dir d);
AtomPtr atom_opaque(const std::string& name, int px, int py);
AtomPtr atom_func(const std::string& fn, std::shared_ptr<const RatFunc> arg);

inline bool atom_lt(const AtomPtr& a, const AtomPtr& b) {
  return a != b && a->key < b->key;
}

/// Human-readable form: "x", "B_{1.0}", "sin(...)".
std::string atom_to_string(const AtomPtr& a);

}  // namespace odeinv

#include "odeinv/atom.hpp"

#include <cstdio>
#include <map>
#include <mutex>

#include "odeinv/ratfunc.hpp"

namespace odeinv {

namespace {

std::string index_key(int px, int py) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%08x%08x", static_cast<unsigned>(px),
                static_cast<unsigned>(py));
  return buf;
}

struct Interner {
  std::mutex mu;
  std::map<std::string, AtomPtr> table;

  AtomPtr intern(AtomData data) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = table.find(data.key);
    if (it != table.end()) return it->second;
    auto ptr = std::make_shared<const AtomData>(std::move(data));
    table.emplace(ptr->key, ptr);
    return ptr;
  }
};

Interner& interner() {
  static Interner instance;
  return instance;
}

AtomPtr make_var(AtomKind kind, char keych) {
  AtomData d;
  d.kind = kind;
  d.key = std::string(1, keych);
  return interner().intern(std::move(d));
}

}  // namespace

const AtomPtr& atom_x() {
  static AtomPtr a = make_var(AtomKind::VarX, '0');
  return a;
}

const AtomPtr& atom_y() {
  static AtomPtr a = make_var(AtomKind::VarY, '1');
  return a;
}

const AtomPtr& atom_var(Dir d) { return d == Dir::X ? atom_x() : atom_y(); }

AtomPtr atom_opaque(const std::string& name, int px, int py) {
  AtomData d;
  d.kind = AtomKind::Opaque;
  d.name = name;
  d.px = px;
  d.py = py;
  d.key = "2" + name + '\0' + index_key(px, py);
  return interner().intern(std::move(d));
}

AtomPtr atom_func(const std::string& fn, std::shared_ptr<const RatFunc> arg) {
  AtomData d;
  d.kind = AtomKind::Func;
  d.name = fn;
  d.key = "3" + fn + '\0' + arg->key();
  d.arg = std::move(arg);
  return interner().intern(std::move(d));
}

std::string atom_to_string(const AtomPtr& a) {
  switch (a->kind) {
    case AtomKind::VarX:
      return "x";
    case AtomKind::VarY:
      return "y";
    case AtomKind::Opaque:
      if (a->px == 0 && a->py == 0) return a->name;
      return a->name + "_{" + std::to_string(a->px) + "." +
             std::to_string(a->py) + "}";
    case AtomKind::Func:
      return a->name + "(" + a->arg->to_string() + ")";
  }
  return "?";
}

}  // namespace odeinv

#include "mkl/algebra.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mkl {

const char* mode_name(AlgMode m) {
  switch (m) {
    case AlgMode::Kleene: return "kleene";
    case AlgMode::MeasurableLiteral: return "measurable-literal";
    case AlgMode::MeasurableGuarded: return "measurable-guarded";
  }
  return "?";
}

std::optional<AlgMode> mode_of(const std::string& name) {
  if (name == "kleene") return AlgMode::Kleene;
  if (name == "measurable-literal" || name == "literal") return AlgMode::MeasurableLiteral;
  if (name == "measurable-guarded" || name == "guarded") return AlgMode::MeasurableGuarded;
  return std::nullopt;
}

namespace {

std::string wit2(const char* what, Elem a, Elem b) {
  std::ostringstream o;
  o << what << " at a=" << a << " b=" << b;
  return o.str();
}

std::string wit1(const char* what, Elem a) {
  std::ostringstream o;
  o << what << " at a=" << a;
  return o.str();
}

void add_item(ValidationReport& rep, const std::string& axiom, bool ok, const std::string& wit) {
  rep.items.push_back({axiom, ok, ok ? std::string() : wit});
  if (!ok) rep.ok = false;
}

// join-semilattice with bottom: comm, assoc, idem, 0 neutral
std::string check_k1(const FiniteAlgebra& m) {
  for (Elem a = 0; a < m.n; ++a) {
    if (m.join(a, a) != a) return wit1("a+a != a", a);
    if (m.join(m.zero_e, a) != a) return wit1("0+a != a", a);
    for (Elem b = 0; b < m.n; ++b) {
      if (m.join(a, b) != m.join(b, a)) return wit2("a+b != b+a", a, b);
      for (Elem c = 0; c < m.n; ++c)
        if (m.join(m.join(a, b), c) != m.join(a, m.join(b, c)))
          return wit2("join not associative", a, b);
    }
  }
  return "";
}

// monoid, join-preserving in each coordinate, 0 annihilates
std::string check_k2(const FiniteAlgebra& m) {
  for (Elem a = 0; a < m.n; ++a) {
    if (m.comp(m.one_e, a) != a || m.comp(a, m.one_e) != a) return wit1("1 not a unit", a);
    if (m.comp(m.zero_e, a) != m.zero_e || m.comp(a, m.zero_e) != m.zero_e)
      return wit1("0 not annihilating", a);
    for (Elem b = 0; b < m.n; ++b)
      for (Elem c = 0; c < m.n; ++c) {
        if (m.comp(m.comp(a, b), c) != m.comp(a, m.comp(b, c)))
          return wit2("comp not associative", a, b);
        if (m.comp(a, m.join(b, c)) != m.join(m.comp(a, b), m.comp(a, c)))
          return wit2("comp not left join-preserving", a, b);
        if (m.comp(m.join(b, c), a) != m.join(m.comp(b, a), m.comp(c, a)))
          return wit2("comp not right join-preserving", a, b);
      }
  }
  return "";
}

}  // namespace

Elem star_of(const FiniteAlgebra& m, Elem a) {
  // cumulative join of powers; stop once the join is stable and the power
  // itself repeats (preperiod + period both exhausted)
  std::set<Elem> seen{m.one_e};
  Elem p = m.one_e, cum = m.one_e;
  for (;;) {
    p = m.comp(p, a);
    Elem cum2 = m.join(cum, p);
    if (cum2 == cum && seen.count(p)) return cum;
    seen.insert(p);
    cum = cum2;
  }
}

std::vector<Elem> powers(const FiniteAlgebra& m, Elem a) {
  std::vector<Elem> ps{m.one_e};
  Elem p = m.one_e;
  for (;;) {
    p = m.comp(p, a);
    bool rep = std::find(ps.begin(), ps.end(), p) != ps.end();
    ps.push_back(p);
    if (rep) return ps;  // the tail from here on is periodic
  }
}

std::vector<Elem> kernel_elements(const FiniteAlgebra& m) {
  std::set<Elem> ker;
  for (Elem a = 0; a < m.n; ++a)
    ker.insert(m.has_star() ? m.star_t[a] : star_of(m, a));
  return std::vector<Elem>(ker.begin(), ker.end());
}

bool is_special(const FiniteAlgebra& m, Elem b) {
  return m.leq(m.one_e, b) && m.leq(m.comp(b, b), b);
}

std::vector<Elem> dual_star_candidates(const FiniteAlgebra& m, Elem a) {
  std::vector<Elem> below;
  for (Elem b = 0; b < m.n; ++b)
    if (is_special(m, b) && m.leq(b, a)) below.push_back(b);
  std::vector<Elem> maximal;
  for (Elem b : below) {
    bool dominated = false;
    for (Elem c : below)
      if (c != b && m.leq(b, c)) { dominated = true; break; }
    if (!dominated) maximal.push_back(b);
  }
  return maximal;
}

FiniteAlgebra with_star(FiniteAlgebra m) {
  m.star_t.resize(m.n);
  for (Elem a = 0; a < m.n; ++a) m.star_t[a] = star_of(m, a);
  return m;
}

FiniteAlgebra with_guarded_dstar(FiniteAlgebra m) {
  m.dstar_t.assign(m.n, -1);
  for (Elem a = 0; a < m.n; ++a) {
    auto cands = dual_star_candidates(m, a);
    if (cands.size() == 1) m.dstar_t[a] = cands[0];
  }
  return m;
}

ValidationReport validate(const FiniteAlgebra& m, AlgMode mode) {
  ValidationReport rep;
  std::string w = check_k1(m);
  add_item(rep, "K1", w.empty(), w);
  w = check_k2(m);
  add_item(rep, "K2", w.empty(), w);

  bool need_star = mode != AlgMode::Kleene;
  if (!m.has_star()) {
    if (need_star) add_item(rep, "K6", false, "star table missing");
  } else {
    std::string w3, w4, w5, w6;
    for (Elem a = 0; a < m.n && w3.empty(); ++a) {
      Elem s = m.star_t[a];
      Elem lhs = m.join(m.one_e, m.comp(a, s));
      if (!m.leq(lhs, s)) { w3 = wit1("1+a.a* not below a*", a); break; }
      lhs = m.join(m.one_e, m.comp(s, a));
      if (!m.leq(lhs, s)) { w3 = wit1("1+a*.a not below a*", a); break; }
      lhs = m.join(m.one_e, m.comp(s, s));
      if (!m.leq(lhs, s)) { w3 = wit1("1+a*.a* not below a*", a); break; }
    }
    add_item(rep, "K3", w3.empty(), w3);
    for (Elem a = 0; a < m.n && w4.empty(); ++a)
      for (Elem b = 0; b < m.n; ++b) {
        if (m.leq(m.comp(a, b), b) && !m.leq(m.comp(m.star_t[a], b), b)) {
          w4 = wit2("a.b<=b but a*.b not<= b", a, b);
          break;
        }
      }
    add_item(rep, "K4", w4.empty(), w4);
    for (Elem a = 0; a < m.n && w5.empty(); ++a)
      for (Elem b = 0; b < m.n; ++b) {
        if (m.leq(m.comp(b, a), b) && !m.leq(m.comp(b, m.star_t[a]), b)) {
          w5 = wit2("b.a<=b but b.a* not<= b", a, b);
          break;
        }
      }
    add_item(rep, "K5", w5.empty(), w5);
    for (Elem a = 0; a < m.n && w6.empty(); ++a)
      if (m.star_t[a] != star_of(m, a)) w6 = wit1("star differs from join of powers", a);
    add_item(rep, "K6", w6.empty(), w6);
  }

  if (mode == AlgMode::Kleene) return rep;

  if (!m.has_dstar()) {
    add_item(rep, "MK2", false, "dual star table missing");
    return rep;
  }
  // MK2 bundles the mode's domain discipline with monotonicity
  std::string w2;
  for (Elem a = 0; a < m.n && w2.empty(); ++a) {
    bool def = m.dstar_t[a] >= 0;
    if (mode == AlgMode::MeasurableLiteral && !def) w2 = wit1("dual star undefined", a);
    if (mode == AlgMode::MeasurableGuarded && def != m.leq(m.one_e, a))
      w2 = wit1(def ? "dual star defined below 1" : "dual star undefined above 1", a);
  }
  for (Elem a = 0; a < m.n && w2.empty(); ++a)
    for (Elem b = 0; b < m.n; ++b) {
      if (m.dstar_t[a] < 0 || m.dstar_t[b] < 0) { rep.skipped++; continue; }
      if (m.leq(a, b) && !m.leq(m.dstar_t[a], m.dstar_t[b])) {
        w2 = wit2("dual star not monotone", a, b);
        break;
      }
    }
  add_item(rep, "MK2", w2.empty(), w2);

  std::string w3, w4, w5;
  for (Elem a = 0; a < m.n; ++a) {
    Elem d = m.dstar_t[a];
    if (d < 0) { rep.skipped++; continue; }
    if (w3.empty() && !(m.leq(m.one_e, d) && m.leq(m.comp(d, d), d)))
      w3 = wit1("a# not special", a);
    if (w4.empty()) {
      if (!m.leq(d, a)) w4 = wit1("a# not below a", a);
      else if (m.dstar_t[d] < 0) w4 = wit1("a## undefined", a);
      else if (!m.leq(d, m.dstar_t[d])) w4 = wit1("a# not below a##", a);
    }
    if (w5.empty())
      for (Elem b = 0; b < m.n; ++b)
        if (is_special(m, b) && m.leq(b, a) && !m.leq(b, d)) {
          w5 = wit2("special b below a but not below a#", a, b);
          break;
        }
  }
  add_item(rep, "MK3", w3.empty(), w3);
  add_item(rep, "MK4", w4.empty(), w4);
  add_item(rep, "MK5", w5.empty(), w5);
  return rep;
}

// ---------- heterogeneous ----------

HeterogeneousAlgebra lift(const FiniteAlgebra& m) {
  if (!m.has_star()) throw std::runtime_error("lift: star table required");
  HeterogeneousAlgebra h;
  h.name = m.name + "+";
  h.a = m;
  h.a.star_t.clear();
  h.a.dstar_t.clear();
  std::set<Elem> ker(m.star_t.begin(), m.star_t.end());
  h.s_elems.assign(ker.begin(), ker.end());
  auto sidx = [&](Elem v) -> int {
    auto it = std::lower_bound(h.s_elems.begin(), h.s_elems.end(), v);
    if (it == h.s_elems.end() || *it != v) return -1;
    return static_cast<int>(it - h.s_elems.begin());
  };
  h.gamma_m.resize(m.n);
  for (Elem x = 0; x < m.n; ++x) h.gamma_m[x] = sidx(m.star_t[x]);
  int sn = h.s_size();
  h.s_join.resize(static_cast<size_t>(sn) * sn);
  for (int i = 0; i < sn; ++i)
    for (int j = 0; j < sn; ++j)
      h.s_join[static_cast<size_t>(i) * sn + j] = sidx(m.star_t[m.join(h.s_elems[i], h.s_elems[j])]);
  h.s_zero = h.gamma_m[m.zero_e];
  h.iota_m.resize(m.n, -1);
  for (Elem x = 0; x < m.n; ++x) {
    if (m.has_dstar()) {
      if (m.dstar_t[x] >= 0) h.iota_m[x] = sidx(m.dstar_t[x]);
    } else {
      auto cands = dual_star_candidates(m, x);
      if (cands.size() == 1) h.iota_m[x] = sidx(cands[0]);
    }
  }
  h.guarded = std::find(h.iota_m.begin(), h.iota_m.end(), -1) != h.iota_m.end();
  return h;
}

FiniteAlgebra lower(const HeterogeneousAlgebra& h) {
  FiniteAlgebra m = h.a;
  m.name = h.name + "-";
  m.star_t.resize(m.n);
  for (Elem x = 0; x < m.n; ++x) m.star_t[x] = h.e(h.gamma(x));
  if (h.has_iota()) {
    m.dstar_t.assign(m.n, -1);
    for (Elem x = 0; x < m.n; ++x)
      if (h.iota(x) >= 0) m.dstar_t[x] = h.e(h.iota(x));
  }
  return m;
}

Elem lower_dstar_at(const HeterogeneousAlgebra& h, Elem x) {
  if (!h.has_iota() || h.iota(x) < 0)
    throw EvalError(EvalError::What::IotaPartial, "interior undefined at " + std::to_string(x));
  return h.e(h.iota(x));
}

ValidationReport validate(const HeterogeneousAlgebra& h, AlgMode mode) {
  ValidationReport rep;
  bool meas = mode != AlgMode::Kleene;
  auto ax = [&](const char* plain, const char* m2) { return meas ? m2 : plain; };

  std::string w = check_k1(h.a);
  if (w.empty()) w = check_k2(h.a);
  add_item(rep, ax("H1", "HM1"), w.empty(), w);

  int sn = h.s_size();
  w.clear();
  for (int i = 0; i < sn && w.empty(); ++i) {
    if (h.sjoin(i, i) != i) w = wit1("s-join not idempotent", i);
    else if (h.sjoin(h.s_zero, i) != i) w = wit1("0_s not bottom", i);
    for (int j = 0; j < sn && w.empty(); ++j) {
      if (h.sjoin(i, j) != h.sjoin(j, i)) w = wit2("s-join not commutative", i, j);
      for (int k = 0; k < sn; ++k)
        if (h.sjoin(h.sjoin(i, j), k) != h.sjoin(i, h.sjoin(j, k))) {
          w = wit2("s-join not associative", i, j);
          break;
        }
    }
  }
  add_item(rep, ax("H2", "HM2"), w.empty(), w);

  if (!meas) {
    // otimes laws; definitional here, asserted anyway
    w.clear();
    for (int i = 0; i < sn && w.empty(); ++i) {
      if (h.otimes1(i, h.a.one_e) != h.e(i)) w = wit1("x1 unit fails at xi=", i);
      if (h.otimes2(h.a.one_e, i) != h.e(i)) w = wit1("x2 unit fails at xi=", i);
      for (Elem a = 0; a < h.a.n && w.empty(); ++a) {
        for (Elem b = 0; b < h.a.n; ++b)
          if (h.otimes1(i, h.a.join(a, b)) != h.a.join(h.otimes1(i, a), h.otimes1(i, b))) {
            w = wit2("x1 not join-preserving", i, a);
            break;
          }
        for (int j = 0; j < sn; ++j)
          if (h.s_leq(i, j) && !h.a.leq(h.otimes1(i, a), h.otimes1(j, a))) {
            w = wit2("x1 not monotone in xi", i, j);
            break;
          }
      }
    }
    add_item(rep, "H3", w.empty(), w);
  } else {
    // HM3: closure decomposes star
    w.clear();
    for (Elem a = 0; a < h.a.n && w.empty(); ++a)
      if (h.e(h.gamma(a)) != star_of(h.a, a)) w = wit1("e(gamma(a)) != join of powers", a);
    add_item(rep, "HM3", w.empty(), w);
  }

  // adjunctions and retractions
  w.clear();
  for (int i = 0; i < sn && w.empty(); ++i)
    for (int j = 0; j < sn; ++j)
      if (i != j && h.e(i) == h.e(j)) { w = wit2("e not injective", i, j); break; }
  std::vector<bool> hit(static_cast<size_t>(sn), false);
  for (Elem a = 0; a < h.a.n; ++a)
    if (h.gamma(a) >= 0 && h.gamma(a) < sn) hit[h.gamma(a)] = true;
  for (int i = 0; i < sn && w.empty(); ++i)
    if (!hit[i]) w = wit1("gamma not onto, misses xi=", i);
  for (Elem a = 0; a < h.a.n && w.empty(); ++a)
    for (int i = 0; i < sn; ++i)
      if (h.s_leq(h.gamma(a), i) != h.a.leq(a, h.e(i))) {
        w = wit2("gamma -| e adjunction fails", a, i);
        break;
      }
  for (int i = 0; i < sn && w.empty(); ++i)
    if (h.gamma(h.e(i)) != i) w = wit1("gamma(e(xi)) != xi", i);
  if (meas && w.empty()) {
    if (!h.has_iota()) w = "iota missing";
    for (Elem a = 0; a < h.a.n && w.empty(); ++a) {
      bool def = h.iota(a) >= 0;
      if (mode == AlgMode::MeasurableLiteral && !def) w = wit1("iota undefined", a);
      if (mode == AlgMode::MeasurableGuarded && def != h.a.leq(h.a.one_e, a))
        w = wit1(def ? "iota defined below 1" : "iota undefined above 1", a);
      if (!w.empty()) break;
      if (!def) { rep.skipped++; continue; }
      for (int i = 0; i < sn; ++i)
        if (h.a.leq(h.e(i), a) != h.s_leq(i, h.iota(a))) {
          w = wit2("e -| iota adjunction fails", a, i);
          break;
        }
    }
    for (int i = 0; i < sn && w.empty(); ++i) {
      if (h.iota(h.e(i)) != i) w = wit1("iota(e(xi)) != xi", i);
    }
  }
  add_item(rep, ax("H4", "HM4"), w.empty(), w);

  w.clear();
  for (int i = 0; i < sn && w.empty(); ++i) {
    Elem ei = h.e(i);
    if (!h.a.leq(h.a.one_e, ei)) w = wit1("1 not below e(xi), xi=", i);
    else if (!h.a.leq(h.a.comp(ei, ei), ei)) w = wit1("e(xi).e(xi) not below e(xi), xi=", i);
  }
  add_item(rep, ax("H5", "HM5"), w.empty(), w);

  if (!meas) {
    w.clear();
    for (Elem a = 0; a < h.a.n && w.empty(); ++a)
      for (Elem b = 0; b < h.a.n; ++b) {
        if (h.a.leq(h.a.comp(a, b), b) && !h.a.leq(h.otimes1(h.gamma(a), b), b)) {
          w = wit2("induction law fails on the left", a, b);
          break;
        }
        if (h.a.leq(h.a.comp(b, a), b) && !h.a.leq(h.otimes2(b, h.gamma(a)), b)) {
          w = wit2("induction law fails on the right", a, b);
          break;
        }
      }
    add_item(rep, "H6", w.empty(), w);

    w.clear();
    for (Elem a = 0; a < h.a.n && w.empty(); ++a)
      if (h.e(h.gamma(a)) != star_of(h.a, a)) w = wit1("e(gamma(a)) != join of powers", a);
    add_item(rep, "H7", w.empty(), w);
  } else {
    w.clear();
    for (Elem b = 0; b < h.a.n && w.empty(); ++b) {
      if (!is_special(h.a, b)) continue;
      if (h.iota(b) < 0) { w = wit1("iota undefined at special b=", b); break; }
      if (!h.s_leq(h.gamma(b), h.iota(b))) w = wit1("gamma(b) not below iota(b), b=", b);
    }
    add_item(rep, "HM6", w.empty(), w);
  }
  return rep;
}

bool roundtrip_k(const FiniteAlgebra& m, std::string* why) {
  FiniteAlgebra back = lower(lift(m));
  auto fail = [&](const std::string& r) {
    if (why) *why = r;
    return false;
  };
  if (back.n != m.n) return fail("carrier size changed");
  if (back.join_t != m.join_t) return fail("join table changed");
  if (back.comp_t != m.comp_t) return fail("comp table changed");
  if (back.one_e != m.one_e || back.zero_e != m.zero_e) return fail("constants changed");
  if (m.has_star() && back.star_t != m.star_t) return fail("star table changed");
  if (m.has_dstar() && back.dstar_t != m.dstar_t) return fail("dual star table changed");
  return true;
}

bool roundtrip_h(const HeterogeneousAlgebra& h, std::string* why) {
  HeterogeneousAlgebra back = lift(lower(h));
  auto fail = [&](const std::string& r) {
    if (why) *why = r;
    return false;
  };
  if (back.a.n != h.a.n || back.a.join_t != h.a.join_t || back.a.comp_t != h.a.comp_t)
    return fail("general part changed");
  // canonical kernel map xi |-> index of e(xi) among back's kernel elements
  int sn = h.s_size();
  if (back.s_size() != sn) return fail("kernel size changed");
  std::vector<int> map(static_cast<size_t>(sn), -1);
  for (int i = 0; i < sn; ++i) {
    Elem ei = h.e(i);
    for (int j = 0; j < back.s_size(); ++j)
      if (back.e(j) == ei) { map[i] = j; break; }
    if (map[i] < 0) return fail("e(xi) missing from recovered kernel");
  }
  for (int i = 0; i < sn; ++i)
    for (int j = 0; j < sn; ++j)
      if (map[h.sjoin(i, j)] != back.sjoin(map[i], map[j])) return fail("kernel join not preserved");
  for (Elem x = 0; x < h.a.n; ++x) {
    if (map[h.gamma(x)] != back.gamma(x)) return fail("gamma not preserved");
    if (h.has_iota()) {
      int li = h.iota(x), ri = back.iota(x);
      if ((li < 0) != (ri < 0)) return fail("iota domain changed");
      if (li >= 0 && map[li] != ri) return fail("iota not preserved");
    }
  }
  return true;
}

// ---------- evaluation ----------

namespace {

[[noreturn]] void no_interp(const char* what) {
  throw EvalError(EvalError::What::NoInterpretation, what);
}

int iota_or_skip(const HeterogeneousAlgebra& h, Elem v) {
  if (!h.has_iota())
    throw EvalError(EvalError::What::IotaPartial, "algebra has no interior map");
  int i = h.iota(v);
  if (i < 0)
    throw EvalError(EvalError::What::IotaPartial, "interior undefined at " + std::to_string(v));
  return i;
}

}  // namespace

Value eval(const HeterogeneousAlgebra& h, const Assignment& asg, const FPtr& f) {
  switch (f->tag) {
    case Formula::Tag::Atom: {
      auto it = asg.find(f->name);
      if (it == asg.end())
        throw EvalError(EvalError::What::UnboundAtom, "no value for atom " + f->name);
      return {Kind::General, it->second};
    }
    case Formula::Tag::One: return {Kind::General, h.a.one_e};
    case Formula::Tag::Zero: return {Kind::General, h.a.zero_e};
    case Formula::Tag::Union:
      return {Kind::General, h.a.join(eval(h, asg, f->a).v, eval(h, asg, f->b).v)};
    case Formula::Tag::Comp:
      return {Kind::General, h.a.comp(eval(h, asg, f->a).v, eval(h, asg, f->b).v)};
    case Formula::Tag::Box: return {Kind::General, h.e(eval(h, asg, f->a).v)};
    case Formula::Tag::FDia: return {Kind::Special, h.gamma(eval(h, asg, f->a).v)};
    case Formula::Tag::BBox: return {Kind::Special, iota_or_skip(h, eval(h, asg, f->a).v)};
    case Formula::Tag::Star:
    case Formula::Tag::DualStar:
      no_interp("single-type star has no direct heterogeneous reading");
  }
  throw std::logic_error("eval: bad tag");
}

Value eval(const HeterogeneousAlgebra& h, const Assignment& asg, const SPtr& s, Position pos) {
  bool prec = pos == Position::Precedent;
  switch (s->tag) {
    case Structure::Tag::Leaf: return eval(h, asg, s->fml);
    case Structure::Tag::Phi: return {Kind::General, prec ? h.a.one_e : h.a.zero_e};
    case Structure::Tag::Odot: {
      if (!prec) no_interp("odot has no succedent reading");
      return {Kind::General, h.a.comp(eval(h, asg, s->a, pos).v, eval(h, asg, s->b, pos).v)};
    }
    case Structure::Tag::LRes: {
      // (X < Y): those z with z.y <= x
      if (prec) no_interp("< has no precedent reading");
      Elem x = eval(h, asg, s->a, Position::Succedent).v;
      Elem y = eval(h, asg, s->b, Position::Precedent).v;
      return {Kind::General, right_residual(h.a, x, y)};
    }
    case Structure::Tag::RRes: {
      // (Y > X): those z with y.z <= x
      if (prec) no_interp("> has no precedent reading");
      Elem y = eval(h, asg, s->a, Position::Precedent).v;
      Elem x = eval(h, asg, s->b, Position::Succedent).v;
      return {Kind::General, left_residual(h.a, y, x)};
    }
    case Structure::Tag::Circ: return {Kind::General, h.e(eval(h, asg, s->a, pos).v)};
    case Structure::Tag::Bullet: {
      Elem v = eval(h, asg, s->a, pos).v;
      return {Kind::Special, prec ? h.gamma(v) : iota_or_skip(h, v)};
    }
    case Structure::Tag::Pow: {
      if (s->idx.symbolic)
        throw EvalError(EvalError::What::SymbolicPow, "symbolic power is not evaluable");
      if (!prec) no_interp("power has no succedent reading");
      Elem g = eval(h, asg, s->a, pos).v;
      Elem v = h.a.one_e;
      for (int i = 0; i < s->idx.k; ++i) v = h.a.comp(v, g);
      return {Kind::General, v};
    }
  }
  throw std::logic_error("eval: bad structure tag");
}

Validity valid(const HeterogeneousAlgebra& h, const Sequent& s) {
  Validity out;
  std::vector<std::string> names = atoms(s);
  size_t total = 1;
  for (size_t i = 0; i < names.size(); ++i) total *= static_cast<size_t>(h.a.n);
  for (size_t code = 0; code < total; ++code) {
    Assignment asg;
    size_t c = code;
    for (const auto& nm : names) {
      asg[nm] = static_cast<Elem>(c % h.a.n);
      c /= h.a.n;
    }
    try {
      Value l = eval(h, asg, s.lhs, Position::Precedent);
      Value r = eval(h, asg, s.rhs, Position::Succedent);
      out.checked++;
      bool ok = l.kind == Kind::Special ? h.s_leq(l.v, r.v) : h.a.leq(l.v, r.v);
      if (!ok) {
        out.valid = false;
        std::ostringstream o;
        for (const auto& kv : asg) o << kv.first << "=" << kv.second << " ";
        o << "gives " << l.v << " not<= " << r.v;
        out.witness = o.str();
        return out;
      }
    } catch (const EvalError& e) {
      if (e.what_kind != EvalError::What::IotaPartial) throw;
      out.skipped++;
    }
  }
  return out;
}

Elem eval1(const FiniteAlgebra& m, const Assignment& asg, const FPtr& f) {
  switch (f->tag) {
    case Formula::Tag::Atom: {
      auto it = asg.find(f->name);
      if (it == asg.end())
        throw EvalError(EvalError::What::UnboundAtom, "no value for atom " + f->name);
      return it->second;
    }
    case Formula::Tag::One: return m.one_e;
    case Formula::Tag::Zero: return m.zero_e;
    case Formula::Tag::Union: return m.join(eval1(m, asg, f->a), eval1(m, asg, f->b));
    case Formula::Tag::Comp: return m.comp(eval1(m, asg, f->a), eval1(m, asg, f->b));
    case Formula::Tag::Star: {
      Elem v = eval1(m, asg, f->a);
      return m.has_star() ? m.star_t[v] : star_of(m, v);
    }
    case Formula::Tag::DualStar: {
      Elem v = eval1(m, asg, f->a);
      if (!m.has_dstar() || m.dstar_t[v] < 0)
        throw EvalError(EvalError::What::IotaPartial,
                        "dual star undefined at " + std::to_string(v));
      return m.dstar_t[v];
    }
    case Formula::Tag::Box:
    case Formula::Tag::FDia:
    case Formula::Tag::BBox:
      no_interp("multi-type connective in single-type evaluation");
  }
  throw std::logic_error("eval1: bad tag");
}

Validity valid1(const FiniteAlgebra& m, const FPtr& alpha, const FPtr& beta) {
  Validity out;
  std::set<std::string> at;
  for (const auto& nm : atoms(alpha)) at.insert(nm);
  for (const auto& nm : atoms(beta)) at.insert(nm);
  std::vector<std::string> names(at.begin(), at.end());
  size_t total = 1;
  for (size_t i = 0; i < names.size(); ++i) total *= static_cast<size_t>(m.n);
  for (size_t code = 0; code < total; ++code) {
    Assignment asg;
    size_t c = code;
    for (const auto& nm : names) {
      asg[nm] = static_cast<Elem>(c % m.n);
      c /= m.n;
    }
    try {
      Elem l = eval1(m, asg, alpha), r = eval1(m, asg, beta);
      out.checked++;
      if (!m.leq(l, r)) {
        out.valid = false;
        std::ostringstream o;
        for (const auto& kv : asg) o << kv.first << "=" << kv.second << " ";
        o << "gives " << l << " not<= " << r;
        out.witness = o.str();
        return out;
      }
    } catch (const EvalError& e) {
      if (e.what_kind != EvalError::What::IotaPartial) throw;
      out.skipped++;
    }
  }
  return out;
}

Elem left_residual(const FiniteAlgebra& m, Elem a, Elem b) {
  Elem r = m.zero_e;
  for (Elem x = 0; x < m.n; ++x)
    if (m.leq(m.comp(a, x), b)) r = m.join(r, x);
  return r;
}

Elem right_residual(const FiniteAlgebra& m, Elem b, Elem a) {
  Elem r = m.zero_e;
  for (Elem x = 0; x < m.n; ++x)
    if (m.leq(m.comp(x, a), b)) r = m.join(r, x);
  return r;
}

// ---------- rule soundness ----------

namespace {

struct MetaVal {
  std::map<std::string, int> v;  // element of A or S index, by sort
};

Value eval_pat(const HeterogeneousAlgebra& h, const MetaVal& mv, const PPtr& p, Position pos);

Value eval_pat_f(const HeterogeneousAlgebra& h, const MetaVal& mv, const PPtr& p) {
  switch (p->tag) {
    case Pat::Tag::MetaFG:
    case Pat::Tag::MetaAtom: return {Kind::General, mv.v.at(p->name)};
    case Pat::Tag::MetaFS: return {Kind::Special, mv.v.at(p->name)};
    case Pat::Tag::FOne: return {Kind::General, h.a.one_e};
    case Pat::Tag::FZero: return {Kind::General, h.a.zero_e};
    case Pat::Tag::FUnion:
      return {Kind::General, h.a.join(eval_pat_f(h, mv, p->a).v, eval_pat_f(h, mv, p->b).v)};
    case Pat::Tag::FComp:
      return {Kind::General, h.a.comp(eval_pat_f(h, mv, p->a).v, eval_pat_f(h, mv, p->b).v)};
    case Pat::Tag::FBox: return {Kind::General, h.e(eval_pat_f(h, mv, p->a).v)};
    case Pat::Tag::FFDia: return {Kind::Special, h.gamma(eval_pat_f(h, mv, p->a).v)};
    case Pat::Tag::FBBox: return {Kind::Special, iota_or_skip(h, eval_pat_f(h, mv, p->a).v)};
    default: throw std::logic_error("eval_pat_f: structural tag");
  }
}

Value eval_pat(const HeterogeneousAlgebra& h, const MetaVal& mv, const PPtr& p, Position pos) {
  bool prec = pos == Position::Precedent;
  switch (p->tag) {
    case Pat::Tag::MetaG: return {Kind::General, mv.v.at(p->name)};
    case Pat::Tag::MetaS: return {Kind::Special, mv.v.at(p->name)};
    case Pat::Tag::Phi: return {Kind::General, prec ? h.a.one_e : h.a.zero_e};
    case Pat::Tag::Odot:
      if (!prec) no_interp("odot has no succedent reading");
      return {Kind::General,
              h.a.comp(eval_pat(h, mv, p->a, pos).v, eval_pat(h, mv, p->b, pos).v)};
    case Pat::Tag::LRes: {
      if (prec) no_interp("< has no precedent reading");
      Elem x = eval_pat(h, mv, p->a, Position::Succedent).v;
      Elem y = eval_pat(h, mv, p->b, Position::Precedent).v;
      return {Kind::General, right_residual(h.a, x, y)};
    }
    case Pat::Tag::RRes: {
      if (prec) no_interp("> has no precedent reading");
      Elem y = eval_pat(h, mv, p->a, Position::Precedent).v;
      Elem x = eval_pat(h, mv, p->b, Position::Succedent).v;
      return {Kind::General, left_residual(h.a, y, x)};
    }
    case Pat::Tag::Circ: return {Kind::General, h.e(eval_pat(h, mv, p->a, pos).v)};
    case Pat::Tag::Bullet: {
      Elem v = eval_pat(h, mv, p->a, pos).v;
      return {Kind::Special, prec ? h.gamma(v) : iota_or_skip(h, v)};
    }
    default: return eval_pat_f(h, mv, p);
  }
}

bool seq_pat_holds(const HeterogeneousAlgebra& h, const MetaVal& mv, const SeqPat& sp) {
  Value l = eval_pat(h, mv, sp.lhs, Position::Precedent);
  Value r = eval_pat(h, mv, sp.rhs, Position::Succedent);
  return l.kind == Kind::Special ? h.s_leq(l.v, r.v) : h.a.leq(l.v, r.v);
}

}  // namespace

SoundnessResult check_rule_soundness(const HeterogeneousAlgebra& h, const RuleSchema& r) {
  SoundnessResult out;
  auto mvs = metavars(r);
  std::vector<std::pair<std::string, MetaSort>> order(mvs.begin(), mvs.end());
  std::vector<int> limit;
  for (auto& [nm, sort] : order) {
    (void)nm;
    bool special = sort == MetaSort::SStruct || sort == MetaSort::SFormula;
    limit.push_back(special ? h.s_size() : h.a.n);
  }
  size_t total = 1;
  for (int l : limit) total *= static_cast<size_t>(l);
  for (size_t code = 0; code < total; ++code) {
    MetaVal mv;
    size_t c = code;
    for (size_t i = 0; i < order.size(); ++i) {
      mv.v[order[i].first] = static_cast<int>(c % limit[i]);
      c /= static_cast<size_t>(limit[i]);
    }
    try {
      bool prem_ok = true;
      if (r.is_omega) {
        // the premise family G^(n) |- D for all n, summarized by the
        // powers join (n = 0 included: the empty composition is 1)
        Elem g = mv.v.at("G"), d = mv.v.at("D");
        prem_ok = h.a.leq(star_of(h.a, g), d);
      } else {
        for (const auto& sp : r.premises)
          if (!seq_pat_holds(h, mv, sp)) { prem_ok = false; break; }
      }
      if (prem_ok && !seq_pat_holds(h, mv, r.conclusion)) {
        out.ok = false;
        std::ostringstream o;
        for (const auto& kv : mv.v) o << kv.first << "=" << kv.second << " ";
        out.witness = o.str() + "satisfies premises but not the conclusion";
        return out;
      }
      out.checked++;
    } catch (const EvalError& e) {
      if (e.what_kind != EvalError::What::IotaPartial) throw;
      out.skipped++;
    }
  }
  return out;
}

// ---------- model zoo ----------

FiniteAlgebra builtin_b2() {
  FiniteAlgebra m;
  m.name = "b2";
  m.n = 2;
  m.join_t = {0, 1, 1, 1};
  m.comp_t = {0, 0, 0, 1};
  m.one_e = 1;
  m.zero_e = 0;
  m.star_t = {1, 1};
  return m;
}

FiniteAlgebra builtin_singleton() {
  FiniteAlgebra m;
  m.name = "singleton";
  m.n = 1;
  m.join_t = {0};
  m.comp_t = {0};
  m.one_e = 0;
  m.zero_e = 0;
  m.star_t = {0};
  m.dstar_t = {0};
  return m;
}

FiniteAlgebra builtin_rel(int k) {
  if (k < 1 || k > 3) throw std::runtime_error("rel(k) supported for 1 <= k <= 3");
  FiniteAlgebra m;
  m.name = "rel" + std::to_string(k);
  int bits = k * k;
  m.n = 1 << bits;
  auto bit = [&](int i, int j) { return 1 << (i * k + j); };
  m.join_t.resize(static_cast<size_t>(m.n) * m.n);
  m.comp_t.resize(static_cast<size_t>(m.n) * m.n);
  for (Elem r = 0; r < m.n; ++r)
    for (Elem s = 0; s < m.n; ++s) {
      m.join_t[static_cast<size_t>(r) * m.n + s] = r | s;
      Elem c = 0;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          for (int mid = 0; mid < k; ++mid)
            if ((r & bit(i, mid)) && (s & bit(mid, j))) c |= bit(i, j);
      m.comp_t[static_cast<size_t>(r) * m.n + s] = c;
    }
  Elem diag = 0;
  for (int i = 0; i < k; ++i) diag |= bit(i, i);
  m.one_e = diag;
  m.zero_e = 0;
  m = with_star(std::move(m));
  m = with_guarded_dstar(std::move(m));  // partial beyond rel(2)
  return m;
}

std::optional<FiniteAlgebra> builtin(const std::string& name) {
  std::string n = name;
  n.erase(std::remove_if(n.begin(), n.end(), [](char c) { return c == '(' || c == ')'; }), n.end());
  if (n == "b2") return builtin_b2();
  if (n == "singleton") return builtin_singleton();
  if (n == "rel1") return builtin_rel(1);
  if (n == "rel2") return builtin_rel(2);
  if (n == "rel3") return builtin_rel(3);
  return std::nullopt;
}

namespace {

// lexicographic table key under a carrier permutation fixing 0 and 1
std::vector<int> perm_key(const FiniteAlgebra& m, const std::vector<int>& pi) {
  std::vector<int> inv(static_cast<size_t>(m.n));
  for (int i = 0; i < m.n; ++i) inv[pi[static_cast<size_t>(i)]] = i;
  std::vector<int> key;
  key.reserve(static_cast<size_t>(m.n) * m.n * 2 + static_cast<size_t>(m.n) * 2);
  for (int a = 0; a < m.n; ++a)
    for (int b = 0; b < m.n; ++b)
      key.push_back(pi[static_cast<size_t>(m.join(inv[static_cast<size_t>(a)], inv[static_cast<size_t>(b)]))]);
  for (int a = 0; a < m.n; ++a)
    for (int b = 0; b < m.n; ++b)
      key.push_back(pi[static_cast<size_t>(m.comp(inv[static_cast<size_t>(a)], inv[static_cast<size_t>(b)]))]);
  for (int a = 0; a < m.n; ++a)
    key.push_back(m.has_star() ? pi[static_cast<size_t>(m.star_t[inv[static_cast<size_t>(a)]])] : 0);
  for (int a = 0; a < m.n; ++a) {
    int d = m.has_dstar() ? m.dstar_t[inv[static_cast<size_t>(a)]] : -1;
    key.push_back(d < 0 ? -1 : pi[static_cast<size_t>(d)]);
  }
  return key;
}

bool is_canonical(const FiniteAlgebra& m) {
  std::vector<int> id(static_cast<size_t>(m.n));
  for (int i = 0; i < m.n; ++i) id[static_cast<size_t>(i)] = i;
  auto base = perm_key(m, id);
  std::vector<int> rest;
  for (int i = 2; i < m.n; ++i) rest.push_back(i);
  std::vector<int> pi = id;
  std::sort(rest.begin(), rest.end());
  do {
    for (size_t i = 0; i < rest.size(); ++i) pi[2 + i] = rest[i];
    if (perm_key(m, pi) < base) return false;
  } while (std::next_permutation(rest.begin(), rest.end()));
  return true;
}

void enumerate_kleene(int n, const std::function<void(const FiniteAlgebra&)>& emit) {
  FiniteAlgebra m;
  m.n = n;
  m.zero_e = 0;
  m.one_e = n == 1 ? 0 : 1;
  m.join_t.assign(static_cast<size_t>(n) * n, -1);
  m.comp_t.assign(static_cast<size_t>(n) * n, -1);
  auto setj = [&](int a, int b, int v) {
    m.join_t[static_cast<size_t>(a) * n + b] = v;
    m.join_t[static_cast<size_t>(b) * n + a] = v;
  };
  for (int a = 0; a < n; ++a) {
    setj(a, a, a);
    setj(0, a, a);
  }
  std::vector<std::pair<int, int>> jfree;
  for (int a = 1; a < n; ++a)
    for (int b = a + 1; b < n; ++b) jfree.push_back({a, b});

  std::function<void(size_t)> fill_comp;
  std::vector<std::pair<int, int>> cfree;

  auto join_laws_ok = [&]() {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (m.join(m.join(a, b), c) != m.join(a, m.join(b, c))) return false;
    return true;
  };
  auto comp_laws_ok = [&]() {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          if (m.comp(m.comp(a, b), c) != m.comp(a, m.comp(b, c))) return false;
          if (m.comp(a, m.join(b, c)) != m.join(m.comp(a, b), m.comp(a, c))) return false;
          if (m.comp(m.join(b, c), a) != m.join(m.comp(b, a), m.comp(c, a))) return false;
        }
    return true;
  };

  fill_comp = [&](size_t i) {
    if (i == cfree.size()) {
      if (!comp_laws_ok()) return;
      FiniteAlgebra done = with_star(m);
      if (is_canonical(done)) emit(done);
      return;
    }
    auto [a, b] = cfree[i];
    for (int v = 0; v < n; ++v) {
      m.comp_t[static_cast<size_t>(a) * n + b] = v;
      fill_comp(i + 1);
    }
    m.comp_t[static_cast<size_t>(a) * n + b] = -1;
  };

  std::function<void(size_t)> fill_join = [&](size_t i) {
    if (i == jfree.size()) {
      if (!join_laws_ok()) return;
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          int& slot = m.comp_t[static_cast<size_t>(a) * n + b];
          if (a == 0 || b == 0) slot = 0;
          else if (a == m.one_e) slot = b;
          else if (b == m.one_e) slot = a;
          else slot = -1;
        }
      cfree.clear();
      for (int a = 2; a < n; ++a)
        for (int b = 2; b < n; ++b) cfree.push_back({a, b});
      fill_comp(0);
      return;
    }
    auto [a, b] = jfree[i];
    for (int v = 0; v < n; ++v) {
      setj(a, b, v);
      fill_join(i + 1);
    }
    setj(a, b, -1);
  };

  if (n == 1) {
    emit(builtin_singleton());
    return;
  }
  fill_join(0);
}

}  // namespace

std::vector<FiniteAlgebra> enumerate_models(int max_size, AlgMode mode) {
  if (max_size < 1 || max_size > 4)
    throw std::runtime_error("enumeration supports sizes 1..4");
  std::vector<FiniteAlgebra> out;
  for (int n = 1; n <= max_size; ++n) {
    enumerate_kleene(n, [&](const FiniteAlgebra& k) {
      if (mode == AlgMode::Kleene) {
        FiniteAlgebra m = k;
        m.name = "enum" + std::to_string(n) + "-" + std::to_string(out.size());
        out.push_back(std::move(m));
        return;
      }
      if (mode == AlgMode::MeasurableGuarded) {
        FiniteAlgebra m = with_guarded_dstar(k);
        if (validate(m, mode).ok && is_canonical(m)) {
          m.name = "enum" + std::to_string(n) + "-" + std::to_string(out.size());
          out.push_back(std::move(m));
        }
        return;
      }
      // literal: try every total dual star map on top of k
      FiniteAlgebra m = k;
      m.dstar_t.assign(static_cast<size_t>(n), 0);
      size_t total = 1;
      for (int i = 0; i < n; ++i) total *= static_cast<size_t>(n);
      for (size_t code = 0; code < total; ++code) {
        size_t c = code;
        for (int i = 0; i < n; ++i) {
          m.dstar_t[static_cast<size_t>(i)] = static_cast<Elem>(c % n);
          c /= static_cast<size_t>(n);
        }
        if (validate(m, mode).ok && is_canonical(m)) {
          FiniteAlgebra lit = m;
          lit.name = "enum" + std::to_string(n) + "-" + std::to_string(out.size());
          out.push_back(std::move(lit));
        }
      }
    });
  }
  return out;
}

InvarianceResult translation_invariance(const FiniteAlgebra& m, const FPtr& alpha, const FPtr& beta) {
  InvarianceResult out;
  Validity lhs = valid1(m, alpha, beta);
  out.lhs_valid = lhs.valid;
  out.skipped += lhs.skipped;
  HeterogeneousAlgebra h = lift(m.has_star() ? m : with_star(m));
  Sequent s = sequent(leaf(translate(alpha)), leaf(translate(beta)));
  Validity rhs = valid(h, s);
  out.rhs_valid = rhs.valid;
  out.skipped += rhs.skipped;
  return out;
}

// ---------- model files ----------

ModelFile parse_model(const std::string& text) {
  std::istringstream in(text);
  ModelFile mf;
  FiniteAlgebra& m = mf.alg;
  m.n = -1;
  bool saw_one = false, saw_zero = false;
  std::string tok;
  auto read_int = [&](const char* what) {
    int v;
    if (!(in >> v)) throw ModelIOError(std::string("expected integer after ") + what);
    return v;
  };
  auto read_table = [&](const char* what, std::vector<Elem>& t, size_t count, int lo) {
    if (m.n < 0) throw ModelIOError("size= must come before tables");
    t.resize(count);
    for (size_t i = 0; i < count; ++i) {
      int v = read_int(what);
      if (v < lo || v >= m.n) throw ModelIOError(std::string("entry out of range in ") + what);
      t[i] = v;
    }
  };
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (tok.rfind("size=", 0) == 0) {
      m.n = std::stoi(tok.substr(5));
      if (m.n < 1) throw ModelIOError("size must be positive");
    } else if (tok.rfind("mode=", 0) == 0) {
      auto md = mode_of(tok.substr(5));
      if (!md) throw ModelIOError("unknown mode " + tok.substr(5));
      mf.mode = *md;
    } else if (tok == "join:") {
      read_table("join:", m.join_t, static_cast<size_t>(m.n) * m.n, 0);
    } else if (tok == "comp:") {
      read_table("comp:", m.comp_t, static_cast<size_t>(m.n) * m.n, 0);
    } else if (tok == "star:") {
      read_table("star:", m.star_t, static_cast<size_t>(m.n), 0);
    } else if (tok == "dstar:") {
      read_table("dstar:", m.dstar_t, static_cast<size_t>(m.n), -1);
    } else if (tok.rfind("one=", 0) == 0) {
      m.one_e = std::stoi(tok.substr(4));
      saw_one = true;
    } else if (tok.rfind("zero=", 0) == 0) {
      m.zero_e = std::stoi(tok.substr(5));
      saw_zero = true;
    } else {
      throw ModelIOError("unexpected token " + tok);
    }
  }
  if (m.n < 0) throw ModelIOError("missing size=");
  if (m.join_t.empty()) throw ModelIOError("missing join: table");
  if (m.comp_t.empty()) throw ModelIOError("missing comp: table");
  if (!saw_one || !saw_zero) throw ModelIOError("missing one=/zero=");
  if (m.one_e < 0 || m.one_e >= m.n || m.zero_e < 0 || m.zero_e >= m.n)
    throw ModelIOError("constants out of range");
  m.name = "file";
  return mf;
}

ModelFile read_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ModelIOError("cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_model(buf.str());
}

std::string write_model(const FiniteAlgebra& m, AlgMode mode) {
  std::ostringstream o;
  o << "size=" << m.n << " mode=" << mode_name(mode) << "\n";
  auto table = [&](const char* name, const std::vector<Elem>& t) {
    o << name;
    for (Elem v : t) o << " " << v;
    o << "\n";
  };
  table("join:", m.join_t);
  table("comp:", m.comp_t);
  o << "one=" << m.one_e << " zero=" << m.zero_e << "\n";
  if (m.has_star()) table("star:", m.star_t);
  if (m.has_dstar()) table("dstar:", m.dstar_t);
  return o.str();
}

}  // namespace mkl

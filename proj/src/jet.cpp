#include "bgk/jet.hpp"

#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>

namespace bgk {

int JetSpace::pack(const std::uint8_t* e, int nv) {
  int key = 0;
  for (int i = nv - 1; i >= 0; --i) key = key * 4 + e[i];
  return key;
}

int JetSpace::index(const std::uint8_t* e) const {
  return lookup[static_cast<std::size_t>(pack(e, nv))];
}

namespace {

void enumerate(int nv, int order, JetSpace& sp) {
  // graded lexicographic enumeration, constant term first
  std::array<std::uint8_t, kJetMaxVars> e{};
  for (int total = 0; total <= order; ++total) {
    // iterate all exponent tuples with sum == total
    std::vector<int> idx(static_cast<std::size_t>(nv), 0);
    // odometer over compositions
    std::function<void(int, int)> rec = [&](int pos, int remaining) {
      if (pos == nv - 1) {
        e[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(remaining);
        sp.exps.push_back(e);
        sp.total_degree.push_back(total);
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        e[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(v);
        rec(pos + 1, remaining - v);
      }
    };
    rec(0, total);
  }
}

}  // namespace

const JetSpace& JetSpace::get(int nv, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, JetSpace> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(nv, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (nv < 1 || nv > kJetMaxVars || order < 0 || order > kJetMaxOrder)
    throw std::invalid_argument("JetSpace: unsupported nv/order");

  JetSpace sp;
  sp.nv = nv;
  sp.order = order;
  enumerate(nv, order, sp);
  sp.size = static_cast<int>(sp.exps.size());
  sp.lookup.fill(-1);
  for (int i = 0; i < sp.size; ++i)
    sp.lookup[static_cast<std::size_t>(pack(sp.exps[static_cast<std::size_t>(i)].data(), nv))] =
        static_cast<std::int16_t>(i);
  // multiplication triples
  for (int i = 0; i < sp.size; ++i) {
    for (int j = 0; j < sp.size; ++j) {
      if (sp.total_degree[static_cast<std::size_t>(i)] +
              sp.total_degree[static_cast<std::size_t>(j)] >
          order)
        continue;
      std::array<std::uint8_t, kJetMaxVars> s{};
      for (int v = 0; v < nv; ++v)
        s[static_cast<std::size_t>(v)] = static_cast<std::uint8_t>(
            sp.exps[static_cast<std::size_t>(i)][static_cast<std::size_t>(v)] +
            sp.exps[static_cast<std::size_t>(j)][static_cast<std::size_t>(v)]);
      sp.mul.push_back({static_cast<std::int16_t>(i), static_cast<std::int16_t>(j),
                        static_cast<std::int16_t>(sp.index(s.data()))});
    }
  }
  auto [pos, inserted] = cache.emplace(key, std::move(sp));
  (void)inserted;
  return pos->second;
}

Jet Jet::variable(const JetSpace& sp, int i, C value) {
  Jet j(sp);
  j.c_[0] = value;
  if (sp.order >= 1) {
    std::array<std::uint8_t, kJetMaxVars> e{};
    e[static_cast<std::size_t>(i)] = 1;
    j.c_[static_cast<std::size_t>(sp.index(e.data()))] = C(1.0);
  }
  return j;
}

C Jet::deriv(const std::uint8_t* e) const {
  int idx = sp_->index(e);
  if (idx < 0) throw std::out_of_range("Jet::deriv: order too high");
  double fact = 1.0;
  for (int v = 0; v < sp_->nv; ++v)
    for (int k = 2; k <= e[static_cast<std::size_t>(v)]; ++k) fact *= k;
  return c_[static_cast<std::size_t>(idx)] * fact;
}

Jet Jet::operator+(const Jet& o) const {
  Jet r(*sp_);
  for (int i = 0; i < sp_->size; ++i)
    r.c_[static_cast<std::size_t>(i)] =
        c_[static_cast<std::size_t>(i)] + o.c_[static_cast<std::size_t>(i)];
  return r;
}

Jet Jet::operator-(const Jet& o) const {
  Jet r(*sp_);
  for (int i = 0; i < sp_->size; ++i)
    r.c_[static_cast<std::size_t>(i)] =
        c_[static_cast<std::size_t>(i)] - o.c_[static_cast<std::size_t>(i)];
  return r;
}

Jet Jet::operator*(const Jet& o) const {
  Jet r(*sp_);
  for (const auto& t : sp_->mul)
    r.c_[static_cast<std::size_t>(t.k)] +=
        c_[static_cast<std::size_t>(t.i)] * o.c_[static_cast<std::size_t>(t.j)];
  return r;
}

Jet Jet::operator+(C s) const {
  Jet r = *this;
  r.c_[0] += s;
  return r;
}

Jet Jet::operator-(C s) const {
  Jet r = *this;
  r.c_[0] -= s;
  return r;
}

Jet Jet::operator*(C s) const {
  Jet r(*sp_);
  for (int i = 0; i < sp_->size; ++i)
    r.c_[static_cast<std::size_t>(i)] = c_[static_cast<std::size_t>(i)] * s;
  return r;
}

Jet Jet::operator-() const {
  Jet r(*sp_);
  for (int i = 0; i < sp_->size; ++i)
    r.c_[static_cast<std::size_t>(i)] = -c_[static_cast<std::size_t>(i)];
  return r;
}

Jet& Jet::operator+=(const Jet& o) {
  for (int i = 0; i < sp_->size; ++i)
    c_[static_cast<std::size_t>(i)] += o.c_[static_cast<std::size_t>(i)];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (int i = 0; i < sp_->size; ++i)
    c_[static_cast<std::size_t>(i)] -= o.c_[static_cast<std::size_t>(i)];
  return *this;
}

Jet Jet::recip() const {
  C c0 = c_[0];
  if (c0 == C(0.0)) throw std::domain_error("Jet::recip at zero");
  // h = this - c0;  1/(c0+h) = (1/c0)(1 - t + t^2 - t^3), t = h/c0
  Jet t = (*this - c0) * (C(1.0) / c0);
  Jet t2 = t * t;
  Jet t3 = t2 * t;
  return (Jet::constant(*sp_, C(1.0)) - t + t2 - t3) * (C(1.0) / c0);
}

Jet Jet::log() const {
  C c0 = c_[0];
  if (c0 == C(0.0)) throw std::domain_error("Jet::log at zero");
  Jet t = (*this - c0) * (C(1.0) / c0);
  Jet t2 = t * t;
  Jet t3 = t2 * t;
  return t - t2 * C(0.5) + t3 * (C(1.0) / 3.0) + std::log(c0);
}

Jet Jet::pow(int k) const {
  if (k < 0) return recip().pow(-k);
  Jet r = Jet::constant(*sp_, C(1.0));
  Jet base = *this;
  while (k > 0) {
    if (k & 1) r = r * base;
    base = base * base;
    k >>= 1;
  }
  return r;
}

}  // namespace bgk

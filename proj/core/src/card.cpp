#include "species/card.hpp"

#include <algorithm>

namespace species {

CardConstraint CardConstraint::at_least(std::uint64_t k) {
  return of({Interval{k, kInf}});
}

CardConstraint CardConstraint::at_most(std::uint64_t k) {
  return of({Interval{0, k}});
}

CardConstraint CardConstraint::exactly(std::uint64_t k) {
  return of({Interval{k, k}});
}

CardConstraint CardConstraint::of(std::vector<Interval> raw) {
  std::erase_if(raw, [](const Interval& iv) { return iv.lo > iv.hi; });
  std::sort(raw.begin(), raw.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  CardConstraint c;
  for (const Interval& iv : raw) {
    if (!c.intervals_.empty()) {
      Interval& last = c.intervals_.back();
      // merge overlapping or adjacent intervals
      if (last.hi == kInf || iv.lo <= last.hi + 1) {
        if (last.hi != kInf && iv.hi > last.hi) last.hi = iv.hi;
        continue;
      }
    }
    c.intervals_.push_back(iv);
  }
  return c;
}

bool CardConstraint::is_full() const {
  return intervals_.size() == 1 && intervals_[0].lo == 0 && intervals_[0].hi == kInf;
}

bool CardConstraint::unbounded() const {
  return !intervals_.empty() && intervals_.back().hi == kInf;
}

bool CardConstraint::contains(std::uint64_t n) const {
  for (const Interval& iv : intervals_)
    if (iv.lo <= n && n <= iv.hi) return true;
  return false;
}

std::uint64_t CardConstraint::min() const { return intervals_.front().lo; }

CardConstraint CardConstraint::shifted_down() const {
  std::vector<Interval> out;
  for (const Interval& iv : intervals_) {
    if (iv.hi == 0) continue;  // only cardinality 0, nothing left after removal
    std::uint64_t lo = iv.lo == 0 ? 0 : iv.lo - 1;
    std::uint64_t hi = iv.hi == kInf ? kInf : iv.hi - 1;
    out.push_back({lo, hi});
  }
  return of(std::move(out));
}

CardConstraint CardConstraint::without_zero() const { return clamped_at_least(1); }

CardConstraint CardConstraint::clamped_at_least(std::uint64_t k) const {
  std::vector<Interval> out;
  for (const Interval& iv : intervals_) {
    if (iv.hi != kInf && iv.hi < k) continue;
    out.push_back({std::max(iv.lo, k), iv.hi});
  }
  return of(std::move(out));
}

std::string to_string(const CardConstraint& c) {
  if (c.is_full()) return "";
  auto num = [](std::uint64_t v) {
    return v == CardConstraint::kInf ? std::string("inf") : std::to_string(v);
  };
  const auto& ivs = c.intervals();
  if (ivs.size() == 1) {
    const auto& iv = ivs[0];
    if (iv.lo == iv.hi) return "card = " + num(iv.lo);
    if (iv.hi == CardConstraint::kInf) return "card >= " + num(iv.lo);
    if (iv.lo == 0) return "card <= " + num(iv.hi);
  }
  std::string s = "card in [";
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    if (i) s += ", ";
    s += num(ivs[i].lo) + ".." + num(ivs[i].hi);
  }
  return s + "]";
}

}  // namespace species

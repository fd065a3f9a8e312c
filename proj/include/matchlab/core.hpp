#pragma once

// One-to-one (marriage) market primitives: agents, outcomes, strict
// preferences with an outside option, profiles, matchings, the stability
// predicates, and the brute-force enumeration oracles built on them.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace matchlab {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a brute-force routine would do exponential work beyond its
// guard and the caller did not force it.
class SizeGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::uint64_t required, std::uint64_t budget)
      : std::runtime_error(what + ": needs " + std::to_string(required) +
                           " evaluations, budget is " + std::to_string(budget)),
        required_(required),
        budget_(budget) {}

  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t required_;
  std::uint64_t budget_;
};

inline constexpr int kMaxEnumerationSide = 6;

enum class Side : std::uint8_t { Man, Woman };

constexpr Side opposite(Side s) noexcept { return s == Side::Man ? Side::Woman : Side::Man; }

struct AgentId {
  Side side = Side::Man;
  int index = 0;

  static constexpr AgentId man(int i) noexcept { return {Side::Man, i}; }
  static constexpr AgentId woman(int i) noexcept { return {Side::Woman, i}; }

  friend constexpr auto operator<=>(const AgentId&, const AgentId&) = default;
};

inline std::string to_string(AgentId a) {
  return (a.side == Side::Man ? "m" : "w") + std::to_string(a.index + 1);
}

// Either an agent on the opposite side (by index) or the outside option.
// The side is implied by whoever owns the preference or matching slot.
class Outcome {
 public:
  constexpr Outcome() noexcept = default;

  static constexpr Outcome outside() noexcept { return Outcome{}; }
  static constexpr Outcome partner(int index) noexcept { return Outcome{index}; }

  constexpr bool is_outside() const noexcept { return index_ < 0; }
  constexpr int index() const noexcept { return index_; }

  // Canonical order: partners by index, outside option last.
  constexpr int key() const noexcept { return is_outside() ? std::numeric_limits<int>::max() : index_; }

  friend constexpr bool operator==(Outcome a, Outcome b) noexcept { return a.index_ == b.index_; }
  friend constexpr auto operator<=>(Outcome a, Outcome b) noexcept { return a.key() <=> b.key(); }

 private:
  constexpr explicit Outcome(int index) noexcept : index_(index < 0 ? -1 : index) {}
  int index_ = -1;
};

// Name of an outcome as seen by an agent on `owner_side`; "@" is the outside option.
inline std::string to_string(Outcome o, Side owner_side) {
  if (o.is_outside()) return "@";
  return to_string(AgentId{opposite(owner_side), o.index()});
}

// Strict linear order over {0..n-1} plus the outside option. Immutable and
// cheap to copy; the rank table is shared between copies.
class Ranking {
 public:
  Ranking() : Ranking(std::vector<Outcome>{Outcome::outside()}, 0) {}

  Ranking(std::vector<Outcome> order, int opposite_count) {
    if (opposite_count < 0) throw InvalidArgument("negative opposite-side size");
    const auto n = static_cast<std::size_t>(opposite_count);
    if (order.size() != n + 1)
      throw InvalidArgument("ranking must list all " + std::to_string(n + 1) +
                            " outcomes, got " + std::to_string(order.size()));
    std::vector<int> pos(n + 1, -1);
    for (std::size_t i = 0; i < order.size(); ++i) {
      const Outcome o = order[i];
      if (!o.is_outside() && o.index() >= opposite_count)
        throw InvalidArgument("ranking mentions unknown agent index " + std::to_string(o.index()));
      const std::size_t slot = o.is_outside() ? n : static_cast<std::size_t>(o.index());
      if (pos[slot] != -1) throw InvalidArgument("ranking lists an outcome twice");
      pos[slot] = static_cast<int>(i);
    }
    data_ = std::make_shared<const Data>(Data{opposite_count, std::move(order), std::move(pos)});
  }

  // Indices 0..n-1 name partners, n names the outside option.
  static Ranking from_codes(std::span<const int> codes, int opposite_count) {
    std::vector<Outcome> order;
    order.reserve(codes.size());
    for (int c : codes) order.push_back(c == opposite_count ? Outcome::outside() : Outcome::partner(c < 0 ? opposite_count + 1 : c));
    return Ranking(std::move(order), opposite_count);
  }

  int opposite_count() const noexcept { return data_->n; }
  std::size_t size() const noexcept { return data_->order.size(); }
  const std::vector<Outcome>& order() const noexcept { return data_->order; }
  Outcome at(std::size_t i) const { return data_->order.at(i); }

  bool contains(Outcome o) const noexcept { return o.is_outside() || (o.index() >= 0 && o.index() < data_->n); }

  int position(Outcome o) const {
    if (!contains(o)) throw InvalidArgument("outcome is not part of this ranking");
    return position_unchecked(o);
  }
  int position_unchecked(Outcome o) const noexcept {
    return data_->pos[o.is_outside() ? static_cast<std::size_t>(data_->n) : static_cast<std::size_t>(o.index())];
  }
  int partner_position(int index) const noexcept { return data_->pos[static_cast<std::size_t>(index)]; }
  int outside_position() const noexcept { return data_->pos[static_cast<std::size_t>(data_->n)]; }

  bool prefers(Outcome x, Outcome y) const { return position(x) < position(y); }
  bool weakly_prefers(Outcome x, Outcome y) const { return position(x) <= position(y); }
  bool acceptable(int index) const noexcept { return partner_position(index) < outside_position(); }

  Outcome top() const noexcept { return data_->order.front(); }

  // Most preferred element of `subset`; the subset must be non-empty.
  Outcome top_among(std::span<const Outcome> subset) const {
    if (subset.empty()) throw InvalidArgument("top_among of an empty set");
    Outcome best = subset.front();
    for (Outcome o : subset.subspan(1))
      if (prefers(o, best)) best = o;
    return best;
  }

  // Most preferred opposite-side agent, ignoring the outside option.
  Outcome top_partner() const noexcept {
    for (Outcome o : data_->order)
      if (!o.is_outside()) return o;
    return Outcome::outside();
  }

  bool same_object(const Ranking& other) const noexcept { return data_ == other.data_; }

  friend bool operator==(const Ranking& a, const Ranking& b) noexcept {
    return a.data_ == b.data_ || (a.data_->n == b.data_->n && a.data_->order == b.data_->order);
  }

  friend std::strong_ordering operator<=>(const Ranking& a, const Ranking& b) noexcept {
    if (auto c = a.data_->n <=> b.data_->n; c != 0) return c;
    return std::lexicographical_compare_three_way(a.data_->order.begin(), a.data_->order.end(),
                                                  b.data_->order.begin(), b.data_->order.end());
  }

 private:
  struct Data {
    int n;
    std::vector<Outcome> order;
    std::vector<int> pos;
  };
  std::shared_ptr<const Data> data_;
};

class Preference {
 public:
  Preference(AgentId owner, Ranking ranking) : owner_(owner), ranking_(std::move(ranking)) {}
  Preference(AgentId owner, std::vector<Outcome> order, int opposite_count)
      : Preference(owner, Ranking(std::move(order), opposite_count)) {}

  AgentId owner() const noexcept { return owner_; }
  const Ranking& ranking() const noexcept { return ranking_; }
  int opposite_count() const noexcept { return ranking_.opposite_count(); }
  const std::vector<Outcome>& order() const noexcept { return ranking_.order(); }

  bool prefers(Outcome x, Outcome y) const { return ranking_.prefers(x, y); }
  bool weakly_prefers(Outcome x, Outcome y) const { return ranking_.weakly_prefers(x, y); }
  Outcome top() const noexcept { return ranking_.top(); }
  Outcome top_partner() const noexcept { return ranking_.top_partner(); }

  Preference with_owner(AgentId owner) const { return Preference(owner, ranking_); }

  friend bool operator==(const Preference&, const Preference&) = default;

 private:
  AgentId owner_;
  Ranking ranking_;
};

inline bool prefers(const Preference& pref, Outcome x, Outcome y) { return pref.prefers(x, y); }
inline bool weakly_prefers(const Preference& pref, Outcome x, Outcome y) { return pref.weakly_prefers(x, y); }

inline std::string to_string(const Preference& pref) {
  std::string out;
  for (Outcome o : pref.order()) {
    if (!out.empty()) out += ' ';
    out += to_string(o, pref.owner().side);
  }
  return out;
}

// Builds a preference from a compact text like "w1 w2 @". `partner_prefix`
// overrides the letter naming partners (students rank colleges "c1"...).
inline Preference parse_preference(AgentId owner, const std::string& text, int opposite_count, char partner_prefix = 0) {
  std::vector<Outcome> order;
  const char want = partner_prefix ? partner_prefix : owner.side == Side::Man ? 'w' : 'm';
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && text[i] == ' ') ++i;
    if (i >= text.size()) break;
    std::size_t j = i;
    while (j < text.size() && text[j] != ' ') ++j;
    const std::string tok = text.substr(i, j - i);
    if (tok == "@") {
      order.push_back(Outcome::outside());
    } else if (tok.size() >= 2 && tok[0] == want &&
               std::all_of(tok.begin() + 1, tok.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      order.push_back(Outcome::partner(std::stoi(tok.substr(1)) - 1));
    } else {
      throw InvalidArgument("bad outcome token '" + tok + "' in preference of " + to_string(owner));
    }
    i = j;
  }
  return Preference(owner, std::move(order), opposite_count);
}

class Profile {
 public:
  Profile(std::vector<Preference> men, std::vector<Preference> women)
      : men_(std::move(men)), women_(std::move(women)) {
    if (men_.empty() || women_.empty()) throw InvalidArgument("a market needs at least one man and one woman");
    const int p = men_count();
    const int q = women_count();
    for (int i = 0; i < p; ++i) check(men_[static_cast<std::size_t>(i)], AgentId::man(i), q);
    for (int j = 0; j < q; ++j) check(women_[static_cast<std::size_t>(j)], AgentId::woman(j), p);
  }

  int men_count() const noexcept { return static_cast<int>(men_.size()); }
  int women_count() const noexcept { return static_cast<int>(women_.size()); }
  int agent_count() const noexcept { return men_count() + women_count(); }

  const Preference& man(int i) const { return men_.at(static_cast<std::size_t>(i)); }
  const Preference& woman(int j) const { return women_.at(static_cast<std::size_t>(j)); }
  const Preference& of(AgentId a) const { return a.side == Side::Man ? man(a.index) : woman(a.index); }
  std::span<const Preference> men() const noexcept { return men_; }
  std::span<const Preference> women() const noexcept { return women_; }

  // Agents in canonical order: men by index, then women by index.
  std::vector<AgentId> agents() const {
    std::vector<AgentId> out;
    out.reserve(static_cast<std::size_t>(agent_count()));
    for (int i = 0; i < men_count(); ++i) out.push_back(AgentId::man(i));
    for (int j = 0; j < women_count(); ++j) out.push_back(AgentId::woman(j));
    return out;
  }

  // Replaces the owner's preference in place.
  void assign(const Preference& pref) {
    check(pref, pref.owner(), pref.owner().side == Side::Man ? women_count() : men_count());
    slot(pref.owner()) = pref;
  }

  Profile with(const Preference& pref) const {
    Profile out = *this;
    out.assign(pref);
    return out;
  }

  friend bool operator==(const Profile&, const Profile&) = default;

 private:
  Preference& slot(AgentId a) {
    return a.side == Side::Man ? men_.at(static_cast<std::size_t>(a.index)) : women_.at(static_cast<std::size_t>(a.index));
  }

  void check(const Preference& pref, AgentId expected, int opposite) const {
    if (pref.owner() != expected)
      throw InvalidArgument("preference owned by " + to_string(pref.owner()) + " placed in slot of " + to_string(expected));
    if (pref.opposite_count() != opposite)
      throw InvalidArgument("preference of " + to_string(expected) + " ranks " + std::to_string(pref.opposite_count()) +
                            " partners, market has " + std::to_string(opposite));
  }

  std::vector<Preference> men_;
  std::vector<Preference> women_;
};

// Shorthand used by fixtures and tests: one string per agent, men first.
inline Profile parse_profile(int p, int q, const std::vector<std::string>& rows) {
  if (rows.size() != static_cast<std::size_t>(p + q)) throw InvalidArgument("parse_profile: need one row per agent");
  std::vector<Preference> men, women;
  for (int i = 0; i < p; ++i) men.push_back(parse_preference(AgentId::man(i), rows[static_cast<std::size_t>(i)], q));
  for (int j = 0; j < q; ++j) women.push_back(parse_preference(AgentId::woman(j), rows[static_cast<std::size_t>(p + j)], p));
  return Profile(std::move(men), std::move(women));
}

class Matching {
 public:
  Matching(int p, int q) : wife_(static_cast<std::size_t>(p), -1), husband_(static_cast<std::size_t>(q), -1) {
    if (p < 1 || q < 1) throw InvalidArgument("matching dimensions must be positive");
  }

  // `wife_of_man[i]` is a woman index or -1; mutuality is derived.
  static Matching from_wives(int q, std::vector<int> wife_of_man) {
    Matching m(static_cast<int>(wife_of_man.size()), q);
    for (std::size_t i = 0; i < wife_of_man.size(); ++i) {
      const int w = wife_of_man[i];
      if (w < 0) continue;
      if (w >= q) throw InvalidArgument("matching mentions unknown woman index " + std::to_string(w));
      if (m.husband_[static_cast<std::size_t>(w)] != -1) throw InvalidArgument("woman matched twice");
      m.husband_[static_cast<std::size_t>(w)] = static_cast<int>(i);
      m.wife_[i] = w;
    }
    return m;
  }

  static Matching from_pairs(int p, int q, std::span<const std::pair<int, int>> pairs) {
    std::vector<int> wives(static_cast<std::size_t>(p), -1);
    for (auto [m, w] : pairs) {
      if (m < 0 || m >= p) throw InvalidArgument("matching mentions unknown man index " + std::to_string(m));
      if (wives[static_cast<std::size_t>(m)] != -1) throw InvalidArgument("man matched twice");
      wives[static_cast<std::size_t>(m)] = w;
    }
    return from_wives(q, std::move(wives));
  }

  int men_count() const noexcept { return static_cast<int>(wife_.size()); }
  int women_count() const noexcept { return static_cast<int>(husband_.size()); }

  Outcome partner(AgentId a) const {
    const auto& v = a.side == Side::Man ? wife_ : husband_;
    if (a.index < 0 || static_cast<std::size_t>(a.index) >= v.size()) throw InvalidArgument("agent outside matching dimensions");
    const int x = v[static_cast<std::size_t>(a.index)];
    return x < 0 ? Outcome::outside() : Outcome::partner(x);
  }
  Outcome wife(int m) const { return partner(AgentId::man(m)); }
  Outcome husband(int w) const { return partner(AgentId::woman(w)); }
  bool is_matched(AgentId a) const { return !partner(a).is_outside(); }

  const std::vector<int>& wives() const noexcept { return wife_; }

  std::vector<std::pair<int, int>> pairs() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < wife_.size(); ++i)
      if (wife_[i] >= 0) out.emplace_back(static_cast<int>(i), wife_[i]);
    return out;
  }

  std::vector<AgentId> unmatched() const {
    std::vector<AgentId> out;
    for (std::size_t i = 0; i < wife_.size(); ++i)
      if (wife_[i] < 0) out.push_back(AgentId::man(static_cast<int>(i)));
    for (std::size_t j = 0; j < husband_.size(); ++j)
      if (husband_[j] < 0) out.push_back(AgentId::woman(static_cast<int>(j)));
    return out;
  }

  friend bool operator==(const Matching& a, const Matching& b) noexcept {
    return a.husband_.size() == b.husband_.size() && a.wife_ == b.wife_;
  }
  friend std::strong_ordering operator<=>(const Matching& a, const Matching& b) noexcept {
    if (auto c = a.wife_.size() <=> b.wife_.size(); c != 0) return c;
    if (auto c = a.husband_.size() <=> b.husband_.size(); c != 0) return c;
    return a.wife_ <=> b.wife_;
  }

 private:
  std::vector<int> wife_;
  std::vector<int> husband_;
};

inline std::string to_string(const Matching& m) {
  std::string out = "[";
  for (auto [a, b] : m.pairs()) {
    if (out.size() > 1) out += ", ";
    out += "(" + to_string(AgentId::man(a)) + "," + to_string(AgentId::woman(b)) + ")";
  }
  return out + "]";
}

namespace detail {
inline void check_dimensions(const Matching& m, const Profile& p) {
  if (m.men_count() != p.men_count() || m.women_count() != p.women_count())
    throw InvalidArgument("matching is " + std::to_string(m.men_count()) + "x" + std::to_string(m.women_count()) +
                          ", profile is " + std::to_string(p.men_count()) + "x" + std::to_string(p.women_count()));
}
}  // namespace detail

inline bool is_individually_rational(const Matching& m, const Profile& p) {
  detail::check_dimensions(m, p);
  for (const AgentId a : p.agents()) {
    const Outcome o = m.partner(a);
    if (!o.is_outside() && p.of(a).prefers(Outcome::outside(), o)) return false;
  }
  return true;
}

// All (man, woman) pairs blocking `m`, sorted by man then woman.
inline std::vector<std::pair<int, int>> blocking_pairs(const Matching& m, const Profile& p) {
  detail::check_dimensions(m, p);
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < p.men_count(); ++i) {
    const Ranking& pm = p.man(i).ranking();
    const Outcome current = m.wife(i);
    for (int j = 0; j < p.women_count(); ++j) {
      if (!pm.prefers(Outcome::partner(j), current)) continue;
      if (p.woman(j).ranking().prefers(Outcome::partner(i), m.husband(j))) out.emplace_back(i, j);
    }
  }
  return out;
}

inline bool is_stable(const Matching& m, const Profile& p) {
  if (!is_individually_rational(m, p)) return false;
  detail::check_dimensions(m, p);
  for (int i = 0; i < p.men_count(); ++i) {
    const Ranking& pm = p.man(i).ranking();
    const int current = pm.position_unchecked(m.wife(i));
    for (int j = 0; j < p.women_count(); ++j) {
      if (pm.partner_position(j) >= current) continue;
      const Ranking& pw = p.woman(j).ranking();
      if (pw.partner_position(i) < pw.position_unchecked(m.husband(j))) return false;
    }
  }
  return true;
}

namespace detail {
inline void guard_enumeration(int p, int q, bool force) {
  if (p < 1 || q < 1) throw InvalidArgument("market sides must be non-empty");
  if (!force && (p > kMaxEnumerationSide || q > kMaxEnumerationSide))
    throw SizeGuardError("matching enumeration refused for " + std::to_string(p) + "x" + std::to_string(q) +
                         " (limit " + std::to_string(kMaxEnumerationSide) + " per side; pass force to override)");
}
}  // namespace detail

// Visits every matching between p men and q women exactly once. Man 0 is
// the slowest-varying position; each man tries "unmatched" before women in
// index order.
template <class Fn>
void for_each_matching(int p, int q, Fn&& fn, bool force = false) {
  detail::guard_enumeration(p, q, force);
  std::vector<int> wives(static_cast<std::size_t>(p), -1);
  std::vector<char> taken(static_cast<std::size_t>(q), 0);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == p) {
      fn(Matching::from_wives(q, wives));
      return;
    }
    wives[static_cast<std::size_t>(i)] = -1;
    self(self, i + 1);
    for (int w = 0; w < q; ++w) {
      if (taken[static_cast<std::size_t>(w)]) continue;
      taken[static_cast<std::size_t>(w)] = 1;
      wives[static_cast<std::size_t>(i)] = w;
      self(self, i + 1);
      taken[static_cast<std::size_t>(w)] = 0;
    }
    wives[static_cast<std::size_t>(i)] = -1;
  };
  rec(rec, 0);
}

inline std::vector<Matching> enumerate_matchings(int p, int q, bool force = false) {
  std::vector<Matching> out;
  for_each_matching(p, q, [&](Matching m) { out.push_back(std::move(m)); }, force);
  return out;
}

// Every stable matching at `p`, in enumeration order.
inline std::vector<Matching> stable_set(const Profile& p, bool force = false) {
  std::vector<Matching> out;
  for_each_matching(
      p.men_count(), p.women_count(),
      [&](Matching m) {
        if (is_stable(m, p)) out.push_back(std::move(m));
      },
      force);
  return out;
}

}  // namespace matchlab

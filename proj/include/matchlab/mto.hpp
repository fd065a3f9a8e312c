#pragma once

// College admissions: students with strict preferences over colleges and
// the outside option, colleges with quotas and strict orders over student
// subsets of size at most their quota. Subsets are bitmasks over students.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "matchlab/core.hpp"
#include "matchlab/da.hpp"
#include "matchlab/detail/coalition_search.hpp"
#include "matchlab/domain.hpp"

namespace matchlab {

using StudentSet = std::uint32_t;

inline constexpr int kMaxStudents = 12;

enum class MtoSide : std::uint8_t { Student, College };

struct MtoAgent {
  MtoSide side = MtoSide::Student;
  int index = 0;

  static constexpr MtoAgent student(int i) noexcept { return {MtoSide::Student, i}; }
  static constexpr MtoAgent college(int i) noexcept { return {MtoSide::College, i}; }
  friend constexpr auto operator<=>(const MtoAgent&, const MtoAgent&) = default;
};

inline std::string to_string(MtoAgent a) {
  return (a.side == MtoSide::Student ? "s" : "c") + std::to_string(a.index + 1);
}

inline std::string student_set_string(StudentSet s) {
  std::string out = "{";
  for (int i = 0; s >> i; ++i)
    if (s >> i & 1u) out += (out.size() > 1 ? "," : "") + to_string(MtoAgent::student(i));
  return out + "}";
}

inline std::uint64_t subsets_up_to(int n, int q) {
  std::uint64_t total = 0, c = 1;
  for (int k = 0; k <= std::min(n, q); ++k) {
    total += c;
    c = c * static_cast<std::uint64_t>(n - k) / static_cast<std::uint64_t>(k + 1);
  }
  return total;
}

struct ResponsivenessViolation {
  int clause = 0;       // 1: adding s vs acceptability of s, 2: swapping s for s'
  StudentSet base = 0;  // S~
  int s = -1;
  int s_prime = -1;     // clause 2 only
};

class CollegePreference {
 public:
  // `order` lists every subset of size <= quota exactly once, best first.
  CollegePreference(int college, int students, int quota, std::vector<StudentSet> order) {
    if (college < 0) throw InvalidArgument("college index must be nonnegative");
    if (students < 1 || students > kMaxStudents)
      throw SizeGuardError("subset preferences support 1.." + std::to_string(kMaxStudents) + " students");
    if (quota < 1) throw InvalidArgument("quota must be at least 1");
    const std::uint64_t expected = subsets_up_to(students, quota);
    if (order.size() != expected)
      throw InvalidArgument("subset ranking of c" + std::to_string(college + 1) + " must list all " +
                            std::to_string(expected) + " subsets of size <= " + std::to_string(quota));
    auto data = std::make_shared<Data>();
    data->college = college;
    data->n = students;
    data->quota = quota;
    data->pos.assign(std::size_t{1} << students, -1);
    for (std::size_t i = 0; i < order.size(); ++i) {
      const StudentSet s = order[i];
      if (s >> students) throw InvalidArgument("subset ranking mentions an unknown student");
      if (std::popcount(s) > quota) throw InvalidArgument("subset " + student_set_string(s) + " exceeds the quota");
      if (data->pos[s] != -1) throw InvalidArgument("subset " + student_set_string(s) + " is listed twice");
      data->pos[s] = static_cast<int>(i);
    }
    data->order = std::move(order);
    // Induced order over students and ∅ from singleton comparisons.
    std::vector<int> codes(static_cast<std::size_t>(students + 1));
    for (int i = 0; i <= students; ++i) codes[static_cast<std::size_t>(i)] = i;
    auto single = [&](int code) { return data->pos[code == students ? 0u : 1u << code]; };
    std::sort(codes.begin(), codes.end(), [&](int a, int b) { return single(a) < single(b); });
    data->induced = Ranking::from_codes(codes, students);
    data->violation = find_violation(*data);
    data_ = std::move(data);
  }

  int college() const noexcept { return data_->college; }
  int student_count() const noexcept { return data_->n; }
  int quota() const noexcept { return data_->quota; }
  const std::vector<StudentSet>& order() const noexcept { return data_->order; }

  bool valid_subset(StudentSet s) const noexcept {
    return (s >> data_->n) == 0 && std::popcount(s) <= data_->quota;
  }
  int position(StudentSet s) const {
    if (!valid_subset(s)) throw InvalidArgument("subset " + student_set_string(s) + " is not ranked by this college");
    return data_->pos[s];
  }
  bool prefers(StudentSet a, StudentSet b) const { return position(a) < position(b); }
  bool weakly_prefers(StudentSet a, StudentSet b) const { return position(a) <= position(b); }

  // Induced preference over students plus ∅.
  const Ranking& induced() const noexcept { return data_->induced; }
  bool acceptable(int s) const noexcept { return data_->induced.acceptable(s); }
  StudentSet top() const noexcept { return data_->order.front(); }

  bool responsive() const noexcept { return !data_->violation; }
  const std::optional<ResponsivenessViolation>& responsiveness_violation() const noexcept { return data_->violation; }

  CollegePreference with_college(int college) const {
    return CollegePreference(college, data_->n, data_->quota, data_->order);
  }

  friend bool operator==(const CollegePreference& a, const CollegePreference& b) noexcept {
    return a.data_ == b.data_ || (a.data_->college == b.data_->college && a.data_->n == b.data_->n &&
                                  a.data_->quota == b.data_->quota && a.data_->order == b.data_->order);
  }

 private:
  struct Data {
    int college = 0;
    int n = 0;
    int quota = 0;
    std::vector<StudentSet> order;
    std::vector<int> pos;
    Ranking induced;
    std::optional<ResponsivenessViolation> violation;
  };

  static std::optional<ResponsivenessViolation> find_violation(const Data& d) {
    const StudentSet all = (StudentSet{1} << d.n) - 1;
    for (StudentSet base = 0; base <= all; ++base) {
      if (std::popcount(base) >= d.quota) continue;
      for (int s = 0; s < d.n; ++s) {
        if (base >> s & 1u) continue;
        const StudentSet with_s = base | 1u << s;
        if ((d.pos[with_s] < d.pos[base]) != (d.pos[1u << s] < d.pos[0]))
          return ResponsivenessViolation{1, base, s, -1};
        for (int t = 0; t < d.n; ++t) {
          if (t == s || (base >> t & 1u)) continue;
          const StudentSet with_t = base | 1u << t;
          if ((d.pos[with_s] < d.pos[with_t]) != (d.pos[1u << s] < d.pos[1u << t]))
            return ResponsivenessViolation{2, base, s, t};
        }
      }
    }
    return std::nullopt;
  }

  std::shared_ptr<const Data> data_;
};

inline std::optional<ResponsivenessViolation> is_responsive(const CollegePreference& pc) {
  return pc.responsiveness_violation();
}

inline Preference induced_preference(const CollegePreference& pc) {
  return Preference(AgentId::woman(pc.college()), pc.induced());
}

// A responsive subset order whose induced order is `induced`: subsets are
// scored additively with distinct powers of two, positive for acceptable
// students and negative for unacceptable ones.
inline CollegePreference responsive_extension(int college, const Ranking& induced, int quota) {
  const int n = induced.opposite_count();
  if (n < 1 || n > kMaxStudents) throw SizeGuardError("responsive extension supports 1..12 students");
  std::vector<std::int64_t> weight(static_cast<std::size_t>(n));
  const int cut = induced.outside_position();
  for (int i = 0; i <= n; ++i) {
    const Outcome o = induced.order()[static_cast<std::size_t>(i)];
    if (o.is_outside()) continue;
    weight[static_cast<std::size_t>(o.index())] =
        i < cut ? std::int64_t{1} << (n - i) : -(std::int64_t{1} << (i - cut - 1));
  }
  std::vector<StudentSet> subsets;
  for (StudentSet s = 0; s < StudentSet{1} << n; ++s)
    if (std::popcount(s) <= quota) subsets.push_back(s);
  auto score = [&](StudentSet s) {
    std::int64_t v = 0;
    for (int i = 0; i < n; ++i)
      if (s >> i & 1u) v += weight[static_cast<std::size_t>(i)];
    return v;
  };
  std::sort(subsets.begin(), subsets.end(), [&](StudentSet a, StudentSet b) { return score(a) > score(b); });
  return CollegePreference(college, n, quota, std::move(subsets));
}

class MtoMatching {
 public:
  MtoMatching(std::vector<int> quotas, int students)
      : quotas_(std::move(quotas)), college_of_(static_cast<std::size_t>(students), -1), members_(quotas_.size(), 0) {
    if (quotas_.empty() || students < 1) throw InvalidArgument("a college market needs colleges and students");
  }

  // `college_of[s]` is a college index or -1.
  static MtoMatching from_assignment(std::vector<int> quotas, std::vector<int> college_of) {
    MtoMatching m(std::move(quotas), static_cast<int>(college_of.size()));
    for (std::size_t s = 0; s < college_of.size(); ++s)
      if (college_of[s] >= 0) m.admit(college_of[s], static_cast<int>(s));
    return m;
  }

  int college_count() const noexcept { return static_cast<int>(quotas_.size()); }
  int student_count() const noexcept { return static_cast<int>(college_of_.size()); }
  const std::vector<int>& quotas() const noexcept { return quotas_; }

  // Student's college as an Outcome over colleges.
  Outcome college_of(int s) const {
    const int c = college_of_.at(static_cast<std::size_t>(s));
    return c < 0 ? Outcome::outside() : Outcome::partner(c);
  }
  StudentSet members(int c) const { return members_.at(static_cast<std::size_t>(c)); }
  const std::vector<int>& assignment() const noexcept { return college_of_; }

  std::vector<int> unmatched_students() const {
    std::vector<int> out;
    for (std::size_t s = 0; s < college_of_.size(); ++s)
      if (college_of_[s] < 0) out.push_back(static_cast<int>(s));
    return out;
  }

  friend bool operator==(const MtoMatching& a, const MtoMatching& b) noexcept {
    return a.quotas_ == b.quotas_ && a.college_of_ == b.college_of_;
  }

 private:
  void admit(int c, int s) {
    if (c >= college_count()) throw InvalidArgument("matching mentions unknown college c" + std::to_string(c + 1));
    auto& m = members_[static_cast<std::size_t>(c)];
    if (std::popcount(m) >= quotas_[static_cast<std::size_t>(c)])
      throw InvalidArgument("college c" + std::to_string(c + 1) + " is over its quota");
    m |= 1u << s;
    college_of_[static_cast<std::size_t>(s)] = c;
  }

  std::vector<int> quotas_;
  std::vector<int> college_of_;
  std::vector<StudentSet> members_;
};

inline std::string to_string(const MtoMatching& m) {
  std::string out = "[";
  for (int c = 0; c < m.college_count(); ++c) {
    if (c) out += ", ";
    out += "(" + to_string(MtoAgent::college(c)) + "," + student_set_string(m.members(c)) + ")";
  }
  for (int s : m.unmatched_students()) out += ", (" + to_string(MtoAgent::student(s)) + ",@)";
  return out + "]";
}

class MtoProfile {
 public:
  // Student i's preference has owner man(i) and ranks colleges as partners.
  MtoProfile(std::vector<Preference> students, std::vector<CollegePreference> colleges)
      : students_(std::move(students)), colleges_(std::move(colleges)) {
    if (students_.empty() || colleges_.empty()) throw InvalidArgument("a college market needs colleges and students");
    if (students_.size() > static_cast<std::size_t>(kMaxStudents)) throw SizeGuardError("too many students");
    for (std::size_t s = 0; s < students_.size(); ++s) check_student(students_[s], static_cast<int>(s));
    for (std::size_t c = 0; c < colleges_.size(); ++c) check_college(colleges_[c], static_cast<int>(c));
  }

  int student_count() const noexcept { return static_cast<int>(students_.size()); }
  int college_count() const noexcept { return static_cast<int>(colleges_.size()); }
  int agent_count() const noexcept { return student_count() + college_count(); }
  const Preference& student(int s) const { return students_.at(static_cast<std::size_t>(s)); }
  const CollegePreference& college(int c) const { return colleges_.at(static_cast<std::size_t>(c)); }
  std::span<const Preference> students() const noexcept { return students_; }
  std::span<const CollegePreference> colleges() const noexcept { return colleges_; }

  std::vector<int> quotas() const {
    std::vector<int> q;
    for (const auto& c : colleges_) q.push_back(c.quota());
    return q;
  }

  std::vector<MtoAgent> agents() const {
    std::vector<MtoAgent> out;
    for (int s = 0; s < student_count(); ++s) out.push_back(MtoAgent::student(s));
    for (int c = 0; c < college_count(); ++c) out.push_back(MtoAgent::college(c));
    return out;
  }

  void assign(const Preference& p) {
    check_student(p, p.owner().index);
    students_[static_cast<std::size_t>(p.owner().index)] = p;
  }
  void assign(const CollegePreference& p) {
    if (p.college() >= college_count()) throw InvalidArgument("unknown college");
    check_college(p, p.college());
    colleges_[static_cast<std::size_t>(p.college())] = p;
  }

  friend bool operator==(const MtoProfile&, const MtoProfile&) = default;

 private:
  void check_student(const Preference& p, int s) const {
    if (p.owner() != AgentId::man(s) || s < 0 || s >= student_count())
      throw InvalidArgument("student preference has the wrong owner");
    if (p.opposite_count() != college_count())
      throw InvalidArgument("preference of s" + std::to_string(s + 1) + " must rank all colleges");
  }
  void check_college(const CollegePreference& p, int c) const {
    if (p.college() != c) throw InvalidArgument("college preference has the wrong owner");
    if (p.student_count() != student_count())
      throw InvalidArgument("subset ranking of c" + std::to_string(c + 1) + " covers the wrong number of students");
    if (!colleges_.empty() && static_cast<std::size_t>(c) < colleges_.size() &&
        colleges_[static_cast<std::size_t>(c)].quota() != p.quota())
      throw InvalidArgument("a report cannot change the quota of c" + std::to_string(c + 1));
  }

  std::vector<Preference> students_;
  std::vector<CollegePreference> colleges_;
};

// ---- SPDA -------------------------------------------------------------------

struct MtoStep {
  int step_number = 0;
  std::vector<std::pair<int, int>> proposals;   // (student, college)
  std::vector<std::pair<int, int>> rejections;  // (student, college)
  MtoMatching tentative;
};

struct MtoResult {
  MtoMatching matching;
  std::vector<MtoStep> trace;
};

namespace detail {

template <bool Record>
MtoMatching spda_kernel(const MtoProfile& prof, std::vector<MtoStep>* trace) {
  const int ns = prof.student_count();
  const int nc = prof.college_count();
  for (int c = 0; c < nc; ++c)
    if (!prof.college(c).responsive())
      throw InvalidArgument("subset ranking of c" + std::to_string(c + 1) + " is not responsive");
  std::vector<std::size_t> next(static_cast<std::size_t>(ns), 0);
  std::vector<std::vector<int>> held(static_cast<std::size_t>(nc));
  std::vector<std::vector<int>> fresh(static_cast<std::size_t>(nc));
  std::vector<int> active(static_cast<std::size_t>(ns));
  for (int s = 0; s < ns; ++s) active[static_cast<std::size_t>(s)] = s;
  std::vector<int> rejected;

  auto build = [&] {
    std::vector<int> of(static_cast<std::size_t>(ns), -1);
    for (int c = 0; c < nc; ++c)
      for (int s : held[static_cast<std::size_t>(c)]) of[static_cast<std::size_t>(s)] = c;
    return MtoMatching::from_assignment(prof.quotas(), std::move(of));
  };

  for (int step = 1;; ++step) {
    std::vector<std::pair<int, int>> proposals, rejections;
    rejected.clear();
    bool any = false;
    for (int s : active) {
      const auto& order = prof.student(s).order();
      auto& k = next[static_cast<std::size_t>(s)];
      if (k >= order.size() || order[k].is_outside()) continue;
      const int c = order[k++].index();
      any = true;
      fresh[static_cast<std::size_t>(c)].push_back(s);
      if constexpr (Record) proposals.emplace_back(s, c);
    }
    if (!any && step > 1) break;
    for (int c = 0; c < nc; ++c) {
      auto& f = fresh[static_cast<std::size_t>(c)];
      if (f.empty()) continue;
      const CollegePreference& pc = prof.college(c);
      auto& h = held[static_cast<std::size_t>(c)];
      h.insert(h.end(), f.begin(), f.end());
      f.clear();
      const Ranking& ind = pc.induced();
      std::sort(h.begin(), h.end(), [&](int a, int b) { return ind.partner_position(a) < ind.partner_position(b); });
      std::size_t keep = 0;
      while (keep < h.size() && keep < static_cast<std::size_t>(pc.quota()) && ind.acceptable(h[keep])) ++keep;
      for (std::size_t i = keep; i < h.size(); ++i) {
        rejected.push_back(h[i]);
        if constexpr (Record) rejections.emplace_back(h[i], c);
      }
      h.resize(keep);
    }
    if constexpr (Record) {
      std::sort(rejections.begin(), rejections.end());
      trace->push_back(MtoStep{step, std::move(proposals), std::move(rejections), build()});
    }
    if (rejected.empty()) break;
    std::sort(rejected.begin(), rejected.end());
    active.swap(rejected);
  }
  return build();
}

}  // namespace detail

inline MtoMatching spda(const MtoProfile& prof) { return detail::spda_kernel<false>(prof, nullptr); }

inline MtoResult run_spda(const MtoProfile& prof) {
  std::vector<MtoStep> trace;
  MtoMatching m = detail::spda_kernel<true>(prof, &trace);
  return {std::move(m), std::move(trace)};
}

// ---- stability --------------------------------------------------------------

enum class MtoBlockKind { College, Student, Pair };

struct MtoBlock {
  MtoBlockKind kind = MtoBlockKind::Pair;
  int college = -1;
  int student = -1;
};

// First blocking certificate: colleges holding an unacceptable student, then
// students holding an unacceptable college, then pairs (college, student) in
// index order.
inline std::optional<MtoBlock> mto_blocking(const MtoMatching& nu, const MtoProfile& prof) {
  if (nu.college_count() != prof.college_count() || nu.student_count() != prof.student_count() ||
      nu.quotas() != prof.quotas())
    throw InvalidArgument("matching does not fit the market");
  const int ns = prof.student_count();
  const int nc = prof.college_count();
  for (int c = 0; c < nc; ++c)
    for (int s = 0; s < ns; ++s)
      if ((nu.members(c) >> s & 1u) && prof.college(c).prefers(0, 1u << s)) return MtoBlock{MtoBlockKind::College, c, s};
  for (int s = 0; s < ns; ++s)
    if (prof.student(s).prefers(Outcome::outside(), nu.college_of(s))) return MtoBlock{MtoBlockKind::Student, -1, s};
  for (int c = 0; c < nc; ++c) {
    const CollegePreference& pc = prof.college(c);
    const StudentSet held = nu.members(c);
    for (int s = 0; s < ns; ++s) {
      if (!prof.student(s).prefers(Outcome::partner(c), nu.college_of(s))) continue;
      if (std::popcount(held) < pc.quota() && pc.prefers(1u << s, 0)) return MtoBlock{MtoBlockKind::Pair, c, s};
      for (int t = 0; t < ns; ++t)
        if ((held >> t & 1u) && pc.prefers(1u << s, 1u << t)) return MtoBlock{MtoBlockKind::Pair, c, s};
    }
  }
  return std::nullopt;
}

inline bool is_stable_mto(const MtoMatching& nu, const MtoProfile& prof) { return !mto_blocking(nu, prof); }

// ---- domains and manipulation -----------------------------------------------

using MtoReport = std::variant<Preference, CollegePreference>;

inline MtoAgent report_owner(const MtoReport& r) {
  if (const auto* p = std::get_if<Preference>(&r)) return MtoAgent::student(p->owner().index);
  return MtoAgent::college(std::get<CollegePreference>(r).college());
}

class MtoDomain {
 public:
  MtoDomain(std::vector<std::vector<Preference>> students, std::vector<std::vector<CollegePreference>> colleges)
      : students_(std::move(students)), colleges_(std::move(colleges)) {
    if (students_.empty() || colleges_.empty()) throw InvalidArgument("domain sides must be non-empty");
    const int nc = college_count();
    const int ns = student_count();
    for (std::size_t s = 0; s < students_.size(); ++s) {
      if (students_[s].empty()) throw InvalidArgument("admissible set of s" + std::to_string(s + 1) + " is empty");
      for (std::size_t i = 0; i < students_[s].size(); ++i) {
        const auto& p = students_[s][i];
        if (p.owner() != AgentId::man(static_cast<int>(s)) || p.opposite_count() != nc)
          throw InvalidArgument("admissible set of s" + std::to_string(s + 1) + " holds an invalid preference");
        for (std::size_t j = 0; j < i; ++j)
          if (students_[s][j].ranking() == p.ranking())
            throw InvalidArgument("admissible set of s" + std::to_string(s + 1) + " lists a preference twice");
      }
    }
    for (std::size_t c = 0; c < colleges_.size(); ++c) {
      const std::string name = "c" + std::to_string(c + 1);
      if (colleges_[c].empty()) throw InvalidArgument("admissible set of " + name + " is empty");
      for (std::size_t i = 0; i < colleges_[c].size(); ++i) {
        const auto& p = colleges_[c][i];
        if (p.college() != static_cast<int>(c) || p.student_count() != ns || p.quota() != colleges_[c][0].quota())
          throw InvalidArgument("admissible set of " + name + " holds an invalid preference");
        if (!p.responsive()) throw InvalidArgument("admissible set of " + name + " holds a non-responsive preference");
        for (std::size_t j = 0; j < i; ++j)
          if (colleges_[c][j] == p) throw InvalidArgument("admissible set of " + name + " lists a preference twice");
      }
    }
  }

  static MtoDomain singleton(const MtoProfile& prof) {
    std::vector<std::vector<Preference>> s;
    std::vector<std::vector<CollegePreference>> c;
    for (const auto& p : prof.students()) s.push_back({p});
    for (const auto& p : prof.colleges()) c.push_back({p});
    return MtoDomain(std::move(s), std::move(c));
  }

  int student_count() const noexcept { return static_cast<int>(students_.size()); }
  int college_count() const noexcept { return static_cast<int>(colleges_.size()); }
  int agent_count() const noexcept { return student_count() + college_count(); }
  const std::vector<Preference>& students(int s) const { return students_.at(static_cast<std::size_t>(s)); }
  const std::vector<CollegePreference>& colleges(int c) const { return colleges_.at(static_cast<std::size_t>(c)); }

  std::size_t set_size(std::size_t k) const {
    return k < students_.size() ? students_[k].size() : colleges_.at(k - students_.size()).size();
  }
  MtoReport report(std::size_t k, std::size_t i) const {
    if (k < students_.size()) return students_[k].at(i);
    return colleges_.at(k - students_.size()).at(i);
  }

  std::optional<std::size_t> position_of(const MtoReport& r) const {
    if (const auto* p = std::get_if<Preference>(&r)) {
      const int s = p->owner().index;
      if (p->owner().side != Side::Man || s < 0 || s >= student_count()) return std::nullopt;
      const auto& set = students_[static_cast<std::size_t>(s)];
      for (std::size_t i = 0; i < set.size(); ++i)
        if (set[i].ranking() == p->ranking()) return i;
      return std::nullopt;
    }
    const auto& cp = std::get<CollegePreference>(r);
    if (cp.college() >= college_count()) return std::nullopt;
    const auto& set = colleges_[static_cast<std::size_t>(cp.college())];
    for (std::size_t i = 0; i < set.size(); ++i)
      if (set[i] == cp) return i;
    return std::nullopt;
  }

  std::optional<std::vector<std::size_t>> choices_of(const MtoProfile& prof) const {
    if (prof.student_count() != student_count() || prof.college_count() != college_count()) return std::nullopt;
    std::vector<std::size_t> out;
    for (const auto& p : prof.students()) {
      auto i = position_of(p);
      if (!i) return std::nullopt;
      out.push_back(*i);
    }
    for (const auto& p : prof.colleges()) {
      auto i = position_of(p);
      if (!i) return std::nullopt;
      out.push_back(*i);
    }
    return out;
  }
  bool contains(const MtoProfile& prof) const { return choices_of(prof).has_value(); }

  std::uint64_t profile_count() const noexcept {
    std::uint64_t n = 1;
    for (std::size_t k = 0; k < students_.size() + colleges_.size(); ++k) n = saturating_mul(n, set_size(k));
    return n;
  }

  MtoProfile profile_from_choices(std::span<const std::size_t> choices) const {
    std::vector<Preference> s;
    std::vector<CollegePreference> c;
    for (std::size_t k = 0; k < students_.size(); ++k) s.push_back(students_[k].at(choices[k]));
    for (std::size_t k = 0; k < colleges_.size(); ++k) c.push_back(colleges_[k].at(choices[students_.size() + k]));
    return MtoProfile(std::move(s), std::move(c));
  }

  template <class Rng>
  MtoProfile sample(Rng& rng) const {
    std::vector<std::size_t> choices;
    for (std::size_t k = 0; k < students_.size() + colleges_.size(); ++k)
      choices.push_back(std::uniform_int_distribution<std::size_t>(0, set_size(k) - 1)(rng));
    return profile_from_choices(choices);
  }

 private:
  std::vector<std::vector<Preference>> students_;
  std::vector<std::vector<CollegePreference>> colleges_;
};

struct MtoWitness {
  MtoProfile base;
  std::vector<MtoAgent> coalition;
  std::vector<MtoReport> misreports;
  MtoMatching outcome_before;
  MtoMatching outcome_after;

  MtoProfile reported() const {
    MtoProfile out = base;
    for (const auto& r : misreports) std::visit([&](const auto& p) { out.assign(p); }, r);
    return out;
  }
};

// Strict gain of `a` from `before` to `after` under its true preference.
inline bool mto_gains(const MtoProfile& truth, MtoAgent a, const MtoMatching& before, const MtoMatching& after) {
  if (a.side == MtoSide::Student)
    return truth.student(a.index).prefers(after.college_of(a.index), before.college_of(a.index));
  return truth.college(a.index).prefers(after.members(a.index), before.members(a.index));
}

namespace detail {

class MtoMarket {
 public:
  MtoMarket(const MtoDomain& domain, const MtoProfile& base)
      : domain_(domain), truth_(base), work_(base), before_(spda(base)), after_(before_), agents_(base.agents()) {
    const auto choices = domain.choices_of(base);
    if (!choices) throw PreconditionError("base profile is not admissible in the domain");
    options_.resize(agents_.size());
    eligible_.resize(agents_.size());
    for (std::size_t k = 0; k < agents_.size(); ++k) {
      for (std::size_t i = 0; i < domain.set_size(k); ++i)
        if (i != (*choices)[k]) options_[k].push_back(i);
      const MtoAgent a = agents_[k];
      eligible_[k] = a.side == MtoSide::Student
                         ? before_.college_of(a.index) != truth_.student(a.index).top()
                         : before_.members(a.index) != truth_.college(a.index).top();
    }
  }

  std::size_t agent_count() const noexcept { return agents_.size(); }
  std::size_t option_count(std::size_t k) const noexcept { return options_[k].size(); }
  bool eligible(std::size_t k) const noexcept { return eligible_[k]; }

  void apply(std::size_t k, std::size_t opt) {
    std::visit([&](const auto& p) { work_.assign(p); }, domain_.report(k, options_[k][opt]));
  }
  void restore(std::size_t k) {
    const MtoAgent a = agents_[k];
    if (a.side == MtoSide::Student)
      work_.assign(truth_.student(a.index));
    else
      work_.assign(truth_.college(a.index));
  }

  bool evaluate(std::span<const std::size_t> coalition) {
    after_ = spda(work_);
    for (std::size_t k : coalition)
      if (!mto_gains(truth_, agents_[k], before_, after_)) return false;
    return true;
  }

  MtoWitness witness(std::span<const std::size_t> coalition, std::span<const std::size_t> opts) const {
    MtoWitness w{truth_, {}, {}, before_, after_};
    for (std::size_t i = 0; i < coalition.size(); ++i) {
      w.coalition.push_back(agents_[coalition[i]]);
      w.misreports.push_back(domain_.report(coalition[i], options_[coalition[i]][opts[i]]));
    }
    return w;
  }

 private:
  const MtoDomain& domain_;
  MtoProfile truth_;
  MtoProfile work_;
  MtoMatching before_;
  MtoMatching after_;
  std::vector<MtoAgent> agents_;
  std::vector<std::vector<std::size_t>> options_;
  std::vector<bool> eligible_;
};

}  // namespace detail

template <class Fn>
SearchStats for_each_manipulation_mto(const MtoDomain& domain, const MtoProfile& base, const SearchOptions& opts,
                                      Fn&& fn) {
  detail::MtoMarket market(domain, base);
  return detail::search_coalitions(market, opts, [&](std::span<const std::size_t> c, std::span<const std::size_t> o) {
    return static_cast<bool>(fn(market.witness(c, o)));
  });
}

// First SPDA manipulation at `base` in canonical order (students before
// colleges, coalition size first).
inline std::optional<MtoWitness> find_manipulation_mto(const MtoDomain& domain, const MtoProfile& base,
                                                      const SearchOptions& opts) {
  std::optional<MtoWitness> found;
  for_each_manipulation_mto(domain, base, opts, [&](MtoWitness w) {
    found = std::move(w);
    return false;
  });
  return found;
}

inline std::optional<std::string> mto_witness_problem(const MtoWitness& w, const MtoDomain* domain = nullptr) {
  if (w.coalition.empty()) return "empty coalition";
  if (w.coalition.size() != w.misreports.size()) return "coalition and misreports differ in length";
  for (std::size_t i = 0; i < w.coalition.size(); ++i) {
    const MtoAgent a = w.coalition[i];
    if (i > 0 && !(w.coalition[i - 1] < a)) return "coalition is not sorted and duplicate-free";
    if (report_owner(w.misreports[i]) != a) return "misreport of " + to_string(a) + " has a foreign owner";
    const bool truthful = a.side == MtoSide::Student
                              ? std::get_if<Preference>(&w.misreports[i])->ranking() == w.base.student(a.index).ranking()
                              : std::get<CollegePreference>(w.misreports[i]) == w.base.college(a.index);
    if (truthful) return to_string(a) + " reports the truth";
    if (domain && !domain->position_of(w.misreports[i])) return "misreport of " + to_string(a) + " is not admissible";
  }
  if (domain && !domain->contains(w.base)) return "base profile is not admissible";
  if (!(spda(w.base) == w.outcome_before)) return "outcome_before does not match SPDA";
  if (!(spda(w.reported()) == w.outcome_after)) return "outcome_after does not match SPDA";
  for (const MtoAgent a : w.coalition)
    if (!mto_gains(w.base, a, w.outcome_before, w.outcome_after)) return to_string(a) + " is not strictly better off";
  return std::nullopt;
}

struct MtoSampledScan {
  std::optional<MtoWitness> witness;
  std::uint64_t bases = 0;
  std::uint64_t evaluations = 0;
};

// Refutation-only scan over seeded random base profiles.
inline MtoSampledScan sampled_manipulation_scan_mto(const MtoDomain& domain, const SearchOptions& search,
                                                    std::uint64_t trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MtoSampledScan out;
  for (std::uint64_t t = 0; t < trials && !out.witness; ++t) {
    const MtoProfile base = domain.sample(rng);
    ++out.bases;
    out.evaluations += for_each_manipulation_mto(domain, base, search, [&](MtoWitness w) {
                         out.witness = std::move(w);
                         return false;
                       }).evaluations;
  }
  return out;
}

// ---- one-to-one translation (all quotas 1) ------------------------------------
// Students become men, colleges become women ranking by induced preference.

inline void require_unit_quotas(std::span<const int> quotas) {
  if (std::any_of(quotas.begin(), quotas.end(), [](int q) { return q != 1; }))
    throw PreconditionError("translation to a marriage market needs every quota to be 1");
}

inline Profile to_one_to_one(const MtoProfile& prof) {
  const auto q = prof.quotas();
  require_unit_quotas(q);
  std::vector<Preference> men(prof.students().begin(), prof.students().end());
  std::vector<Preference> women;
  for (const auto& c : prof.colleges()) women.push_back(induced_preference(c));
  return Profile(std::move(men), std::move(women));
}

inline PreferenceDomain to_one_to_one(const MtoDomain& d) {
  std::vector<std::vector<Preference>> sets;
  for (int s = 0; s < d.student_count(); ++s) sets.push_back(d.students(s));
  for (int c = 0; c < d.college_count(); ++c) {
    auto& set = sets.emplace_back();
    for (const auto& p : d.colleges(c)) {
      require_unit_quotas(std::vector<int>{p.quota()});
      set.push_back(induced_preference(p));
    }
  }
  return PreferenceDomain(d.student_count(), d.college_count(), std::move(sets));
}

inline Matching to_one_to_one(const MtoMatching& m) {
  require_unit_quotas(m.quotas());
  return Matching::from_wives(m.college_count(), m.assignment());
}

// Quota-1 college preference whose subset order follows `induced`.
inline CollegePreference unit_quota_preference(int college, const Ranking& induced) {
  std::vector<StudentSet> order;
  for (Outcome o : induced.order()) order.push_back(o.is_outside() ? 0u : 1u << o.index());
  return CollegePreference(college, induced.opposite_count(), 1, std::move(order));
}

inline MtoProfile from_one_to_one(const Profile& p) {
  std::vector<Preference> students(p.men().begin(), p.men().end());
  std::vector<CollegePreference> colleges;
  for (int j = 0; j < p.women_count(); ++j) colleges.push_back(unit_quota_preference(j, p.woman(j).ranking()));
  return MtoProfile(std::move(students), std::move(colleges));
}

inline MtoDomain from_one_to_one(const PreferenceDomain& d) {
  std::vector<std::vector<Preference>> students;
  std::vector<std::vector<CollegePreference>> colleges;
  for (int i = 0; i < d.men_count(); ++i) students.push_back(d.admissible(AgentId::man(i)));
  for (int j = 0; j < d.women_count(); ++j) {
    auto& set = colleges.emplace_back();
    for (const auto& p : d.admissible(AgentId::woman(j))) set.push_back(unit_quota_preference(j, p.ranking()));
  }
  return MtoDomain(std::move(students), std::move(colleges));
}

}  // namespace matchlab

#pragma once

// JSON reading and writing for markets, matchings, domains, orderings,
// college markets, witnesses and DA traces. See docs/format.md.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "matchlab/core.hpp"
#include "matchlab/da.hpp"
#include "matchlab/domain.hpp"
#include "matchlab/manipulation.hpp"
#include "matchlab/mto.hpp"

namespace matchlab {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

// A malformed document; the message names the offending field.
class FormatError : public InvalidArgument {
 public:
  FormatError(const std::string& field, const std::string& problem) : InvalidArgument(field + ": " + problem) {}
};

namespace io_detail {

inline const Json& require(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw FormatError(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(path + "." + key, "missing");
  return *it;
}

inline int require_int(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = require(j, key, path);
  if (!v.is_number_integer()) throw FormatError(path + "." + key, "expected an integer");
  return v.get<int>();
}

// "m3" -> 2 for prefix 'm'; range-checked against `count`.
inline int agent_index(const std::string& name, char prefix, int count, const std::string& path) {
  if (name.size() < 2 || name[0] != prefix) throw FormatError(path, "expected an agent named " + std::string(1, prefix) + "<k>, got \"" + name + "\"");
  int k = 0;
  for (std::size_t i = 1; i < name.size(); ++i) {
    if (name[i] < '0' || name[i] > '9' || k > 1000) throw FormatError(path, "bad agent name \"" + name + "\"");
    k = k * 10 + (name[i] - '0');
  }
  if (k < 1 || k > count) throw FormatError(path, "agent \"" + name + "\" is out of range 1.." + std::to_string(count));
  return k - 1;
}

inline char prefix_of(Side s) { return s == Side::Man ? 'm' : 'w'; }

inline std::string name(char prefix, int index) { return std::string(1, prefix) + std::to_string(index + 1); }

template <class Fn>
decltype(auto) at_field(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const FormatError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw FormatError(path, e.what());
  }
}

inline Ranking parse_ranking(const Json& list, char partner_prefix, int n, const std::string& path) {
  if (!list.is_array()) throw FormatError(path, "expected a list of outcomes");
  std::vector<Outcome> order;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = path + "[" + std::to_string(i) + "]";
    if (!list[i].is_string()) throw FormatError(where, "expected a string");
    const std::string s = list[i].get<std::string>();
    order.push_back(s == "@" ? Outcome::outside() : Outcome::partner(agent_index(s, partner_prefix, n, where)));
  }
  return at_field(path, [&] { return Ranking(std::move(order), n); });
}

inline Json ranking_json(const Ranking& r, char partner_prefix) {
  Json out = Json::array();
  for (Outcome o : r.order()) out.push_back(o.is_outside() ? std::string("@") : name(partner_prefix, o.index()));
  return out;
}

inline StudentSet parse_subset(const Json& list, int students, const std::string& path) {
  if (!list.is_array()) throw FormatError(path, "expected a list of students");
  StudentSet s = 0;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string where = path + "[" + std::to_string(i) + "]";
    if (!list[i].is_string()) throw FormatError(where, "expected a string");
    const int k = agent_index(list[i].get<std::string>(), 's', students, where);
    if (s >> k & 1u) throw FormatError(where, "student listed twice");
    s |= 1u << k;
  }
  return s;
}

inline Json subset_json(StudentSet s) {
  Json out = Json::array();
  for (int i = 0; s >> i; ++i)
    if (s >> i & 1u) out.push_back(name('s', i));
  return out;
}

// Counts keys named <prefix><k> in an object and checks they are 1..count.
inline int count_prefixed(const Json& obj, char prefix) {
  int n = 0;
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!it.key().empty() && it.key()[0] == prefix) ++n;
  return n;
}

}  // namespace io_detail

// ---- one-to-one market ------------------------------------------------------

inline Profile profile_from_json(const Json& j) {
  const int p = io_detail::require_int(j, "men", "market");
  const int q = io_detail::require_int(j, "women", "market");
  if (p < 1 || q < 1) throw FormatError("market.men", "both sides need at least one agent");
  const Json& prefs = io_detail::require(j, "preferences", "market");
  if (!prefs.is_object()) throw FormatError("market.preferences", "expected an object");
  std::vector<std::optional<Preference>> men(static_cast<std::size_t>(p)), women(static_cast<std::size_t>(q));
  for (auto it = prefs.begin(); it != prefs.end(); ++it) {
    const std::string path = "market.preferences." + it.key();
    const bool man = !it.key().empty() && it.key()[0] == 'm';
    const int idx = io_detail::agent_index(it.key(), man ? 'm' : 'w', man ? p : q, path);
    auto& slot = (man ? men : women)[static_cast<std::size_t>(idx)];
    slot.emplace(AgentId{man ? Side::Man : Side::Woman, idx},
                 io_detail::parse_ranking(it.value(), man ? 'w' : 'm', man ? q : p, path));
  }
  std::vector<Preference> m, w;
  for (int i = 0; i < p; ++i) {
    if (!men[static_cast<std::size_t>(i)]) throw FormatError("market.preferences." + io_detail::name('m', i), "missing");
    m.push_back(*men[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < q; ++i) {
    if (!women[static_cast<std::size_t>(i)]) throw FormatError("market.preferences." + io_detail::name('w', i), "missing");
    w.push_back(*women[static_cast<std::size_t>(i)]);
  }
  return Profile(std::move(m), std::move(w));
}

inline Json to_json(const Profile& p) {
  Json prefs = Json::object();
  for (const AgentId a : p.agents())
    prefs[to_string(a)] = io_detail::ranking_json(p.of(a).ranking(), io_detail::prefix_of(opposite(a.side)));
  return Json{{"men", p.men_count()}, {"women", p.women_count()}, {"preferences", prefs}};
}

// ---- matchings --------------------------------------------------------------

inline Json to_json(const Matching& m) {
  Json pairs = Json::array();
  for (auto [a, b] : m.pairs()) pairs.push_back(Json::array({io_detail::name('m', a), io_detail::name('w', b)}));
  Json unmatched = Json::array();
  for (const AgentId a : m.unmatched()) unmatched.push_back(to_string(a));
  return Json{{"pairs", pairs}, {"unmatched", unmatched}};
}

inline Matching matching_from_json(const Json& j, int p, int q) {
  const Json& pairs = io_detail::require(j, "pairs", "matching");
  if (!pairs.is_array()) throw FormatError("matching.pairs", "expected a list");
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const std::string path = "matching.pairs[" + std::to_string(i) + "]";
    const Json& pr = pairs[i];
    if (!pr.is_array() || pr.size() != 2 || !pr[0].is_string() || !pr[1].is_string())
      throw FormatError(path, "expected [\"m<k>\", \"w<k>\"]");
    out.emplace_back(io_detail::agent_index(pr[0].get<std::string>(), 'm', p, path),
                     io_detail::agent_index(pr[1].get<std::string>(), 'w', q, path));
  }
  Matching m = io_detail::at_field("matching.pairs", [&] { return Matching::from_pairs(p, q, out); });
  if (j.contains("unmatched")) {
    const Json& u = j["unmatched"];
    if (!u.is_array()) throw FormatError("matching.unmatched", "expected a list");
    std::vector<std::string> listed, actual;
    for (const auto& x : u) {
      if (!x.is_string()) throw FormatError("matching.unmatched", "expected agent names");
      listed.push_back(x.get<std::string>());
    }
    for (const AgentId a : m.unmatched()) actual.push_back(to_string(a));
    std::sort(listed.begin(), listed.end());
    std::sort(actual.begin(), actual.end());
    if (listed != actual) throw FormatError("matching.unmatched", "does not match the pairs");
  }
  return m;
}

// ---- domains ----------------------------------------------------------------

inline PreferenceDomain domain_from_json(const Json& j) {
  const Json& agents = io_detail::require(j, "agents", "domain");
  if (!agents.is_object()) throw FormatError("domain.agents", "expected an object");
  const int p = j.contains("men") ? io_detail::require_int(j, "men", "domain") : io_detail::count_prefixed(agents, 'm');
  const int q = j.contains("women") ? io_detail::require_int(j, "women", "domain") : io_detail::count_prefixed(agents, 'w');
  if (p < 1 || q < 1) throw FormatError("domain.agents", "both sides need at least one agent");
  std::vector<std::optional<std::vector<Preference>>> sets(static_cast<std::size_t>(p + q));
  for (auto it = agents.begin(); it != agents.end(); ++it) {
    const std::string path = "domain.agents." + it.key();
    const bool man = !it.key().empty() && it.key()[0] == 'm';
    const int idx = io_detail::agent_index(it.key(), man ? 'm' : 'w', man ? p : q, path);
    if (!it.value().is_array()) throw FormatError(path, "expected a list of preferences");
    std::vector<Preference> set;
    for (std::size_t i = 0; i < it.value().size(); ++i)
      set.emplace_back(AgentId{man ? Side::Man : Side::Woman, idx},
                       io_detail::parse_ranking(it.value()[i], man ? 'w' : 'm', man ? q : p,
                                                path + "[" + std::to_string(i) + "]"));
    sets[static_cast<std::size_t>(man ? idx : p + idx)] = std::move(set);
  }
  std::vector<std::vector<Preference>> out;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const std::string who = k < static_cast<std::size_t>(p) ? io_detail::name('m', static_cast<int>(k))
                                                            : io_detail::name('w', static_cast<int>(k) - p);
    if (!sets[k]) throw FormatError("domain.agents." + who, "missing");
    out.push_back(std::move(*sets[k]));
  }
  return io_detail::at_field("domain.agents", [&] { return PreferenceDomain(p, q, std::move(out)); });
}

inline Json to_json(const PreferenceDomain& d) {
  Json agents = Json::object();
  for (const AgentId a : d.agents()) {
    Json set = Json::array();
    for (const Preference& pr : d.admissible(a))
      set.push_back(io_detail::ranking_json(pr.ranking(), io_detail::prefix_of(opposite(a.side))));
    agents[to_string(a)] = set;
  }
  return Json{{"men", d.men_count()}, {"women", d.women_count()}, {"agents", agents}};
}

struct OrderingPair {
  PriorOrdering men;
  PriorOrdering women;
};

inline OrderingPair orderings_from_json(const Json& j, int p, int q) {
  auto read = [&](const char* key, char prefix, int n, Side side) {
    const Json& list = io_detail::require(j, key, "orderings");
    if (!list.is_array()) throw FormatError(std::string("orderings.") + key, "expected a list");
    std::vector<int> order;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = std::string("orderings.") + key + "[" + std::to_string(i) + "]";
      if (!list[i].is_string()) throw FormatError(path, "expected a string");
      order.push_back(io_detail::agent_index(list[i].get<std::string>(), prefix, n, path));
    }
    return io_detail::at_field(std::string("orderings.") + key, [&] {
      if (static_cast<int>(order.size()) != n) throw InvalidArgument("must list every agent once");
      return PriorOrdering(side, std::move(order));
    });
  };
  return OrderingPair{read("men", 'm', p, Side::Man), read("women", 'w', q, Side::Woman)};
}

inline Json to_json(const OrderingPair& o) {
  Json men = Json::array(), women = Json::array();
  for (int i : o.men.order()) men.push_back(io_detail::name('m', i));
  for (int i : o.women.order()) women.push_back(io_detail::name('w', i));
  return Json{{"men", men}, {"women", women}};
}

// ---- college admissions -----------------------------------------------------

inline bool is_college_market(const Json& j) { return j.is_object() && j.contains("colleges"); }

namespace io_detail {

inline CollegePreference parse_college(const Json& obj, int c, int ns, const std::string& path, int quota) {
  const Json& ranking = require(obj, "subset_ranking", path);
  if (!ranking.is_array()) throw FormatError(path + ".subset_ranking", "expected a list of subsets");
  std::vector<StudentSet> order;
  for (std::size_t i = 0; i < ranking.size(); ++i)
    order.push_back(parse_subset(ranking[i], ns, path + ".subset_ranking[" + std::to_string(i) + "]"));
  return at_field(path + ".subset_ranking", [&] { return CollegePreference(c, ns, quota, std::move(order)); });
}

inline Json college_json(const CollegePreference& pc) {
  Json ranking = Json::array();
  for (StudentSet s : pc.order()) ranking.push_back(subset_json(s));
  return Json{{"quota", pc.quota()}, {"subset_ranking", ranking}};
}

}  // namespace io_detail

inline MtoProfile mto_profile_from_json(const Json& j) {
  const Json& colleges = io_detail::require(j, "colleges", "market");
  const Json& students = io_detail::require(j, "students", "market");
  if (!colleges.is_object()) throw FormatError("market.colleges", "expected an object");
  if (!students.is_object()) throw FormatError("market.students", "expected an object");
  const int nc = static_cast<int>(colleges.size());
  const int ns = static_cast<int>(students.size());
  if (nc < 1 || ns < 1) throw FormatError("market", "needs at least one college and one student");
  if (ns > kMaxStudents) throw FormatError("market.students", "at most " + std::to_string(kMaxStudents) + " students");
  std::vector<std::optional<Preference>> sp(static_cast<std::size_t>(ns));
  std::vector<std::optional<CollegePreference>> cp(static_cast<std::size_t>(nc));
  for (auto it = students.begin(); it != students.end(); ++it) {
    const std::string path = "market.students." + it.key();
    const int s = io_detail::agent_index(it.key(), 's', ns, path);
    sp[static_cast<std::size_t>(s)].emplace(AgentId::man(s), io_detail::parse_ranking(it.value(), 'c', nc, path));
  }
  for (auto it = colleges.begin(); it != colleges.end(); ++it) {
    const std::string path = "market.colleges." + it.key();
    const int c = io_detail::agent_index(it.key(), 'c', nc, path);
    const int quota = io_detail::require_int(it.value(), "quota", path);
    if (quota < 1) throw FormatError(path + ".quota", "must be at least 1");
    cp[static_cast<std::size_t>(c)] = io_detail::parse_college(it.value(), c, ns, path, quota);
  }
  std::vector<Preference> s;
  std::vector<CollegePreference> c;
  for (int i = 0; i < ns; ++i) {
    if (!sp[static_cast<std::size_t>(i)]) throw FormatError("market.students." + io_detail::name('s', i), "missing");
    s.push_back(*sp[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < nc; ++i) {
    if (!cp[static_cast<std::size_t>(i)]) throw FormatError("market.colleges." + io_detail::name('c', i), "missing");
    c.push_back(*cp[static_cast<std::size_t>(i)]);
  }
  return MtoProfile(std::move(s), std::move(c));
}

inline Json to_json(const MtoProfile& p) {
  Json colleges = Json::object(), students = Json::object();
  for (const auto& c : p.colleges()) colleges[io_detail::name('c', c.college())] = io_detail::college_json(c);
  for (const auto& s : p.students()) students[io_detail::name('s', s.owner().index)] = io_detail::ranking_json(s.ranking(), 'c');
  return Json{{"colleges", colleges}, {"students", students}};
}

inline Json to_json(const MtoMatching& m) {
  Json assignments = Json::array();
  for (int c = 0; c < m.college_count(); ++c)
    assignments.push_back(Json::array({io_detail::name('c', c), io_detail::subset_json(m.members(c))}));
  Json unmatched = Json::array();
  for (int s : m.unmatched_students()) unmatched.push_back(io_detail::name('s', s));
  return Json{{"assignments", assignments}, {"unmatched", unmatched}};
}

inline MtoMatching mto_matching_from_json(const Json& j, std::vector<int> quotas, int ns) {
  const Json& a = io_detail::require(j, "assignments", "matching");
  if (!a.is_array()) throw FormatError("matching.assignments", "expected a list");
  std::vector<int> of(static_cast<std::size_t>(ns), -1);
  const int nc = static_cast<int>(quotas.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string path = "matching.assignments[" + std::to_string(i) + "]";
    if (!a[i].is_array() || a[i].size() != 2 || !a[i][0].is_string()) throw FormatError(path, "expected [\"c<k>\", [students]]");
    const int c = io_detail::agent_index(a[i][0].get<std::string>(), 'c', nc, path);
    const StudentSet s = io_detail::parse_subset(a[i][1], ns, path);
    for (int k = 0; k < ns; ++k) {
      if (!(s >> k & 1u)) continue;
      if (of[static_cast<std::size_t>(k)] != -1) throw FormatError(path, "student assigned twice");
      of[static_cast<std::size_t>(k)] = c;
    }
  }
  return io_detail::at_field("matching.assignments", [&] { return MtoMatching::from_assignment(std::move(quotas), std::move(of)); });
}

// {"students": {"s1": [[...], ...]}, "colleges": {"c1": {"quota": 2, "subset_rankings": [[[...], ...], ...]}}}
inline MtoDomain mto_domain_from_json(const Json& j) {
  const Json& colleges = io_detail::require(j, "colleges", "domain");
  const Json& students = io_detail::require(j, "students", "domain");
  if (!colleges.is_object() || !students.is_object()) throw FormatError("domain", "colleges and students must be objects");
  const int nc = static_cast<int>(colleges.size());
  const int ns = static_cast<int>(students.size());
  if (nc < 1 || ns < 1) throw FormatError("domain", "needs at least one college and one student");
  std::vector<std::vector<Preference>> ss(static_cast<std::size_t>(ns));
  std::vector<std::vector<CollegePreference>> cs(static_cast<std::size_t>(nc));
  for (auto it = students.begin(); it != students.end(); ++it) {
    const std::string path = "domain.students." + it.key();
    const int s = io_detail::agent_index(it.key(), 's', ns, path);
    if (!it.value().is_array()) throw FormatError(path, "expected a list of preferences");
    for (std::size_t i = 0; i < it.value().size(); ++i)
      ss[static_cast<std::size_t>(s)].emplace_back(
          AgentId::man(s), io_detail::parse_ranking(it.value()[i], 'c', nc, path + "[" + std::to_string(i) + "]"));
  }
  for (auto it = colleges.begin(); it != colleges.end(); ++it) {
    const std::string path = "domain.colleges." + it.key();
    const int c = io_detail::agent_index(it.key(), 'c', nc, path);
    const int quota = io_detail::require_int(it.value(), "quota", path);
    const Json& rankings = io_detail::require(it.value(), "subset_rankings", path);
    if (!rankings.is_array()) throw FormatError(path + ".subset_rankings", "expected a list");
    for (std::size_t i = 0; i < rankings.size(); ++i) {
      Json one{{"subset_ranking", rankings[i]}};
      cs[static_cast<std::size_t>(c)].push_back(
          io_detail::parse_college(one, c, ns, path + ".subset_rankings[" + std::to_string(i) + "]", quota));
    }
  }
  return io_detail::at_field("domain", [&] { return MtoDomain(std::move(ss), std::move(cs)); });
}

inline Json to_json(const MtoDomain& d) {
  Json colleges = Json::object(), students = Json::object();
  for (int c = 0; c < d.college_count(); ++c) {
    Json rankings = Json::array();
    for (const auto& pc : d.colleges(c)) rankings.push_back(io_detail::college_json(pc)["subset_ranking"]);
    colleges[io_detail::name('c', c)] = Json{{"quota", d.colleges(c).front().quota()}, {"subset_rankings", rankings}};
  }
  for (int s = 0; s < d.student_count(); ++s) {
    Json set = Json::array();
    for (const auto& p : d.students(s)) set.push_back(io_detail::ranking_json(p.ranking(), 'c'));
    students[io_detail::name('s', s)] = set;
  }
  return Json{{"colleges", colleges}, {"students", students}};
}

// ---- witnesses and traces ---------------------------------------------------

inline Json to_json(const ManipulationWitness& w) {
  Json coalition = Json::array(), misreports = Json::object();
  for (std::size_t i = 0; i < w.coalition.size(); ++i) {
    const AgentId a = w.coalition[i];
    coalition.push_back(to_string(a));
    misreports[to_string(a)] = io_detail::ranking_json(w.misreports[i].ranking(), io_detail::prefix_of(opposite(a.side)));
  }
  return Json{{"schema_version", kSchemaVersion}, {"base", to_json(w.base)},           {"coalition", coalition},
              {"misreports", misreports},         {"before", to_json(w.outcome_before)}, {"after", to_json(w.outcome_after)}};
}

inline Json to_json(const MtoWitness& w) {
  Json coalition = Json::array(), misreports = Json::object();
  for (std::size_t i = 0; i < w.coalition.size(); ++i) {
    const std::string who = to_string(w.coalition[i]);
    coalition.push_back(who);
    if (const auto* p = std::get_if<Preference>(&w.misreports[i]))
      misreports[who] = io_detail::ranking_json(p->ranking(), 'c');
    else
      misreports[who] = io_detail::college_json(std::get<CollegePreference>(w.misreports[i]));
  }
  return Json{{"schema_version", kSchemaVersion}, {"base", to_json(w.base)},           {"coalition", coalition},
              {"misreports", misreports},         {"before", to_json(w.outcome_before)}, {"after", to_json(w.outcome_after)}};
}

inline std::string trace_json_lines(const DaTrace& t) {
  const Side ps = proposing_side(t.rule);
  std::string out;
  for (const DaStep& s : t.steps) {
    Json proposals = Json::array(), rejections = Json::array();
    for (auto [x, y] : s.proposals) proposals.push_back(Json::array({to_string(x), to_string(y)}));
    for (auto [x, y] : s.rejections) rejections.push_back(Json::array({to_string(x), to_string(y)}));
    Json line{{"step", s.step_number}, {"proposer_side", ps == Side::Man ? "men" : "women"},
              {"proposals", proposals}, {"rejections", rejections}, {"tentative", to_json(s.tentative)}};
    out += line.dump() + "\n";
  }
  return out;
}

inline std::string trace_json_lines(const std::vector<MtoStep>& trace) {
  std::string out;
  for (const MtoStep& s : trace) {
    Json proposals = Json::array(), rejections = Json::array();
    for (auto [st, c] : s.proposals) proposals.push_back(Json::array({io_detail::name('s', st), io_detail::name('c', c)}));
    for (auto [st, c] : s.rejections) rejections.push_back(Json::array({io_detail::name('s', st), io_detail::name('c', c)}));
    Json line{{"step", s.step_number}, {"proposals", proposals}, {"rejections", rejections},
              {"tentative", to_json(s.tentative)}};
    out += line.dump() + "\n";
  }
  return out;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path, "cannot open file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path, std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace matchlab

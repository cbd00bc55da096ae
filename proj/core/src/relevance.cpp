#include "ssbayes/relevance.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "ssbayes/errors.hpp"

namespace ssbayes {

int ModelSpecGraph::add_node(const std::string& name, bool is_parameter) {
  if (name.empty()) throw InvalidParameter("node name must be non-empty");
  if (has_node(name)) throw InvalidParameter("duplicate node name: " + name);
  names_.push_back(name);
  parents_.emplace_back();
  children_.emplace_back();
  const int id = n_nodes() - 1;
  if (is_parameter) parameters_.insert(id);
  return id;
}

void ModelSpecGraph::add_edge(const std::string& parent, const std::string& child) {
  const int p = index(parent);
  const int c = index(child);
  if (p == c) throw InvalidParameter("self-edge on node " + parent);
  auto& ch = children_[static_cast<std::size_t>(p)];
  if (std::find(ch.begin(), ch.end(), c) != ch.end()) return;  // idempotent
  ch.push_back(c);
  parents_[static_cast<std::size_t>(c)].push_back(p);
}

void ModelSpecGraph::mark_observed(const std::string& name) {
  observed_.insert(index(name));
}

void ModelSpecGraph::set_query(const std::string& candidate, const std::string& target) {
  candidate_ = candidate;
  target_ = target;
}

bool ModelSpecGraph::has_node(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

int ModelSpecGraph::index(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InvalidQuery("unknown node: " + name);
  return static_cast<int>(it - names_.begin());
}

void ModelSpecGraph::validate() const {
  // Acyclicity by Kahn's algorithm.
  std::vector<int> indeg(static_cast<std::size_t>(n_nodes()), 0);
  for (int i = 0; i < n_nodes(); ++i) {
    indeg[static_cast<std::size_t>(i)] =
        static_cast<int>(parents(i).size());
  }
  std::deque<int> q;
  for (int i = 0; i < n_nodes(); ++i) {
    if (indeg[static_cast<std::size_t>(i)] == 0) q.push_back(i);
  }
  int seen = 0;
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    ++seen;
    for (int c : children(v)) {
      if (--indeg[static_cast<std::size_t>(c)] == 0) q.push_back(c);
    }
  }
  if (seen != n_nodes()) throw InvalidParameter("model spec graph has a cycle");

  if (has_node(target_)) {
    const int t = index(target_);
    if (is_observed(t)) {
      throw InvalidParameter("prediction target must not be observed");
    }
    for (int p : parents(t)) {
      if (name(p) != "x*" && !is_parameter(p)) {
        throw InvalidParameter(
            "target parents must be x* or parameter nodes; got " + name(p));
      }
    }
  }
}

UndirectedGraph moralize(const ModelSpecGraph& spec) {
  UndirectedGraph g;
  for (int i = 0; i < spec.n_nodes(); ++i) g.names.push_back(spec.name(i));
  g.adjacency.assign(static_cast<std::size_t>(spec.n_nodes()), {});
  auto connect = [&g](int a, int b) {
    if (a == b) return;
    g.adjacency[static_cast<std::size_t>(a)].insert(b);
    g.adjacency[static_cast<std::size_t>(b)].insert(a);
  };
  for (int v = 0; v < spec.n_nodes(); ++v) {
    const auto& par = spec.parents(v);
    for (int p : par) connect(p, v);
    for (std::size_t i = 0; i < par.size(); ++i) {
      for (std::size_t j = i + 1; j < par.size(); ++j) connect(par[i], par[j]);
    }
  }
  return g;
}

int UndirectedGraph::index(const std::string& nm) const {
  const auto it = std::find(names.begin(), names.end(), nm);
  if (it == names.end()) throw InvalidQuery("unknown node: " + nm);
  return static_cast<int>(it - names.begin());
}

bool UndirectedGraph::has_edge(const std::string& a, const std::string& b) const {
  return adjacency[static_cast<std::size_t>(index(a))].count(index(b)) > 0;
}

ModelSpecGraph build_standard_spec(const DesignFlags& flags, bool prior_dependent,
                                   const StandardSpecOptions& options) {
  if (!flags.labeled_pairs && !flags.unlabeled_x && !flags.unlabeled_y &&
      !flags.retrospective_pairs) {
    throw InvalidParameter("build_standard_spec: no data source selected");
  }
  ModelSpecGraph g;
  const std::string cond = options.merge_phi_theta ? "phi_theta" : "phi";
  const std::string marg = options.merge_phi_theta ? "phi_theta" : "theta";

  g.add_node("y*");
  g.add_node("x*");
  g.add_node(cond, /*is_parameter=*/true);
  if (!options.merge_phi_theta) g.add_node("theta", /*is_parameter=*/true);
  if (flags.labeled_pairs) {
    g.add_node("Y");
    g.add_node("X");
  }
  if (flags.unlabeled_x) g.add_node("X^m");
  if (flags.unlabeled_y) g.add_node("Y^m");
  if (flags.retrospective_pairs) {
    g.add_node("Y^r");
    g.add_node("X^r");
  }

  g.add_edge(cond, "y*");
  g.add_edge("x*", "y*");
  if (!options.x_star_by_design) g.add_edge(marg, "x*");
  if (flags.labeled_pairs) {
    g.add_edge(marg, "X");
    g.add_edge("X", "Y");
    g.add_edge(cond, "Y");
  }
  if (flags.unlabeled_x) g.add_edge(marg, "X^m");
  if (flags.unlabeled_y) {
    g.add_edge(cond, "Y^m");
    if (!options.merge_phi_theta) g.add_edge(marg, "Y^m");
  }
  if (flags.retrospective_pairs) {
    g.add_edge("Y^r", "X^r");
    g.add_edge(cond, "X^r");
    if (!options.merge_phi_theta) g.add_edge(marg, "X^r");
  }
  if (prior_dependent) {
    g.add_node("hyper", /*is_parameter=*/true);
    g.add_edge("hyper", cond);
    if (!options.merge_phi_theta) g.add_edge("hyper", marg);
  }

  for (const char* nm : {"Y", "X", "X^m", "Y^m", "Y^r", "X^r"}) {
    if (g.has_node(nm)) g.mark_observed(nm);
  }
  g.mark_observed("x*");
  if (options.theta_known) g.mark_observed(marg);
  g.set_query("X^m", "y*");
  g.validate();
  return g;
}

namespace {

std::set<int> ancestors_of(const ModelSpecGraph& g, const std::set<int>& seed) {
  std::set<int> anc = seed;
  std::deque<int> q(seed.begin(), seed.end());
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (int p : g.parents(v)) {
      if (anc.insert(p).second) q.push_back(p);
    }
  }
  return anc;
}

// Neighbor ids sorted by node name, for deterministic trail discovery.
std::vector<int> sorted_by_name(const ModelSpecGraph& g, std::vector<int> ids) {
  std::sort(ids.begin(), ids.end(), [&g](int a, int b) {
    return g.name(a) < g.name(b);
  });
  return ids;
}

// Bayes-ball state: (node, entered-moving-up?). "Up" means the ball is at
// the node having arrived from a child (or is leaving the source), so it can
// pass to parents and children; "down" means it arrived from a parent, so it
// passes to children and bounces back up only at activated colliders.
struct BallState {
  int node;
  bool up;
  bool operator<(const BallState& o) const {
    return node != o.node ? node < o.node : up < o.up;
  }
};

// Breadth-first active-trail search from `source` given conditioning set Z.
// Returns the node sequence of a shortest active trail to `sink`, or an
// empty vector when none exists (i.e. d-separated).
std::vector<int> active_trail(const ModelSpecGraph& g, int source, int sink,
                              const std::set<int>& z) {
  const std::set<int> anc_z = ancestors_of(g, z);
  std::map<BallState, BallState> pred;
  std::deque<BallState> queue;
  const BallState start{source, true};
  pred.emplace(start, start);
  queue.push_back(start);

  auto reconstruct = [&](BallState s) {
    std::vector<int> path;
    while (true) {
      path.push_back(s.node);
      const BallState p = pred.at(s);
      if (p.node == s.node && p.up == s.up) break;
      s = p;
    }
    std::reverse(path.begin(), path.end());
    return path;
  };

  while (!queue.empty()) {
    const BallState cur = queue.front();
    queue.pop_front();
    if (cur.node == sink) return reconstruct(cur);

    const bool in_z = z.count(cur.node) > 0;
    auto push = [&](int nxt, bool up) {
      const BallState s{nxt, up};
      if (pred.emplace(s, cur).second) queue.push_back(s);
    };
    if (cur.up && !in_z) {
      for (int p : sorted_by_name(g, g.parents(cur.node))) push(p, true);
      for (int c : sorted_by_name(g, g.children(cur.node))) push(c, false);
    } else if (!cur.up) {
      if (!in_z) {
        for (int c : sorted_by_name(g, g.children(cur.node))) push(c, false);
      }
      if (anc_z.count(cur.node) > 0) {
        for (int p : sorted_by_name(g, g.parents(cur.node))) push(p, true);
      }
    }
  }
  return {};
}

}  // namespace

bool d_separated(const ModelSpecGraph& spec, const std::string& a,
                 const std::string& b, const std::set<std::string>& conditioning) {
  const int ia = spec.index(a);
  const int ib = spec.index(b);
  if (ia == ib) throw InvalidQuery("d_separated: a and b must differ");
  std::set<int> z;
  for (const auto& nm : conditioning) z.insert(spec.index(nm));
  if (z.count(ia) > 0 || z.count(ib) > 0) {
    throw InvalidQuery("d_separated: query nodes must not be conditioned on");
  }
  return active_trail(spec, ia, ib, z).empty();
}

namespace {

// Shortest skeleton path ignoring blockedness, for explanations.
std::vector<int> skeleton_path(const ModelSpecGraph& g, int source, int sink) {
  std::map<int, int> pred;
  std::deque<int> queue{source};
  pred[source] = source;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    if (v == sink) {
      std::vector<int> path;
      int cur = v;
      while (pred[cur] != cur) {
        path.push_back(cur);
        cur = pred[cur];
      }
      path.push_back(source);
      std::reverse(path.begin(), path.end());
      return path;
    }
    std::vector<int> nbrs = g.parents(v);
    nbrs.insert(nbrs.end(), g.children(v).begin(), g.children(v).end());
    for (int n : sorted_by_name(g, std::move(nbrs))) {
      if (pred.emplace(n, v).second) queue.push_back(n);
    }
  }
  return {};
}

bool is_edge(const ModelSpecGraph& g, int parent, int child) {
  const auto& ch = g.children(parent);
  return std::find(ch.begin(), ch.end(), child) != ch.end();
}

std::string join_path(const ModelSpecGraph& g, const std::vector<int>& path) {
  std::ostringstream os;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) os << " -- ";
    os << g.name(path[i]);
  }
  return os.str();
}

}  // namespace

RelevanceVerdict unlabeled_relevant(const ModelSpecGraph& spec) {
  spec.validate();
  if (!spec.has_node(spec.candidate())) {
    throw InvalidQuery("candidate node " + spec.candidate() + " absent from spec");
  }
  if (!spec.has_node(spec.target())) {
    throw InvalidQuery("target node " + spec.target() + " absent from spec");
  }
  const int cand = spec.index(spec.candidate());
  const int targ = spec.index(spec.target());

  std::set<int> z = spec.observed();
  if (spec.has_node("x*")) z.insert(spec.index("x*"));
  z.erase(cand);
  z.erase(targ);

  RelevanceVerdict verdict;
  const std::vector<int> trail = active_trail(spec, cand, targ, z);
  verdict.relevant = !trail.empty();

  std::ostringstream os;
  if (verdict.relevant) {
    for (int v : trail) verdict.witness_path.push_back(spec.name(v));
    os << spec.candidate() << " is relevant to " << spec.target()
       << ": active trail " << join_path(spec, trail);
    verdict.explanation = os.str();
    return verdict;
  }

  const std::vector<int> skel = skeleton_path(spec, cand, targ);
  if (skel.empty()) {
    os << spec.candidate() << " is irrelevant to " << spec.target()
       << ": no trail connects them";
    verdict.explanation = os.str();
    return verdict;
  }
  const std::set<int> anc_z = ancestors_of(spec, z);
  int blocker = -1;
  for (std::size_t i = 1; i + 1 < skel.size(); ++i) {
    const int v = skel[i];
    const bool collider = is_edge(spec, skel[i - 1], v) && is_edge(spec, skel[i + 1], v);
    const bool blocked = collider ? anc_z.count(v) == 0 : z.count(v) > 0;
    if (blocked) {
      blocker = v;
      break;
    }
  }
  os << spec.candidate() << " is irrelevant to " << spec.target()
     << ": every trail is blocked given the observed set; e.g. "
     << join_path(spec, skel);
  if (blocker >= 0) os << " is blocked at " << spec.name(blocker);
  verdict.explanation = os.str();
  return verdict;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    const std::string t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

bool default_parameter_name(const std::string& name) {
  return name == "phi" || name == "theta" || name == "phi_theta" ||
         name.rfind("hyper", 0) == 0;
}

}  // namespace

ModelSpecGraph parse_model_spec(const std::string& text) {
  std::vector<std::string> nodes, params, observed;
  std::vector<std::pair<std::string, std::string>> edges;
  std::string query_candidate, query_target;
  bool saw_param_line = false;

  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw FormatError("model spec line " + std::to_string(lineno) +
                        ": expected 'key: values'");
    }
    const std::string key = trim(line.substr(0, colon));
    const std::string rest = trim(line.substr(colon + 1));
    if (key == "nodes") {
      for (auto& n : split_list(rest, ',')) nodes.push_back(n);
    } else if (key == "param") {
      saw_param_line = true;
      for (auto& n : split_list(rest, ',')) params.push_back(n);
    } else if (key == "observed") {
      for (auto& n : split_list(rest, ',')) observed.push_back(n);
    } else if (key == "edges") {
      for (auto& e : split_list(rest, ',')) {
        const auto arrow = e.find("->");
        if (arrow == std::string::npos) {
          throw FormatError("model spec line " + std::to_string(lineno) +
                            ": edge '" + e + "' lacks '->'");
        }
        edges.emplace_back(trim(e.substr(0, arrow)), trim(e.substr(arrow + 2)));
      }
    } else if (key == "query") {
      std::string spec = rest;
      const auto arrow = spec.find("->");
      std::vector<std::string> parts;
      if (arrow != std::string::npos) {
        parts = {trim(spec.substr(0, arrow)), trim(spec.substr(arrow + 2))};
      } else {
        parts = split_list(spec, ',');
      }
      if (parts.size() != 2) {
        throw FormatError("model spec line " + std::to_string(lineno) +
                          ": query needs 'candidate -> target'");
      }
      query_candidate = parts[0];
      query_target = parts[1];
    } else {
      throw FormatError("model spec line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
  }

  if (nodes.empty()) throw FormatError("model spec declares no nodes");

  ModelSpecGraph g;
  for (const auto& n : nodes) {
    const bool is_param =
        saw_param_line
            ? std::find(params.begin(), params.end(), n) != params.end()
            : default_parameter_name(n);
    g.add_node(n, is_param);
  }
  try {
    for (const auto& [p, c] : edges) g.add_edge(p, c);
    for (const auto& n : observed) g.mark_observed(n);
  } catch (const InvalidQuery& e) {
    throw FormatError(std::string("model spec references undeclared node: ") +
                      e.what());
  }
  if (!query_candidate.empty()) g.set_query(query_candidate, query_target);
  g.validate();
  return g;
}

const std::vector<SpecCatalogEntry>& builtin_spec_catalog() {
  static const std::vector<SpecCatalogEntry> catalog = [] {
    std::vector<SpecCatalogEntry> out;
    DesignFlags semi;
    semi.labeled_pairs = true;
    semi.unlabeled_x = true;

    out.push_back({"regression-independent-prior",
                   "labeled pairs + unlabeled x, conditional and margin "
                   "parameters independent a priori",
                   build_standard_spec(semi, false)});
    out.push_back({"regression-conjugate-joint-prior",
                   "joint conjugate prior on the (y, x) covariance; the "
                   "induced conditional/margin parameters factorize",
                   build_standard_spec(semi, false)});
    out.push_back({"regression-coupled-joint-prior",
                   "joint prior coupling the conditional and margin "
                   "parameters through a shared hyperparameter",
                   build_standard_spec(semi, true)});
    out.push_back({"binary-cell-product-prior",
                   "2x2 cell model, independent Beta priors on the "
                   "conditional rates and the x margin",
                   build_standard_spec(semi, false)});
    out.push_back({"binary-cell-single-dirichlet",
                   "2x2 cell model, one Dirichlet on the joint cells; the "
                   "induced rate/margin parameters are independent",
                   build_standard_spec(semi, false)});
    out.push_back({"binary-cell-dirichlet-mixture",
                   "2x2 cell model, two-component Dirichlet mixture prior "
                   "couples the rates and the margin",
                   build_standard_spec(semi, true)});
    StandardSpecOptions known;
    known.theta_known = true;
    out.push_back({"factor-known-loadings",
                   "factor regression with known loadings and idiosyncratic "
                   "variances: the x-margin parameter is fully known",
                   build_standard_spec(semi, false, known)});
    out.push_back({"factor-uncertain-loadings",
                   "factor regression with uncertain loadings shared by the "
                   "conditional and the x margin",
                   build_standard_spec(semi, true)});
    StandardSpecOptions merged;
    merged.merge_phi_theta = true;
    out.push_back({"kernel-shared-parameter",
                   "kernel regression where the x distribution itself "
                   "parameterizes the regression function",
                   build_standard_spec(semi, false, merged)});
    out.push_back({"mixture-classification-shared",
                   "two-class mixture discrimination: weights and component "
                   "parameters drive both the margin and the conditional",
                   build_standard_spec(semi, false, merged)});
    return out;
  }();
  return catalog;
}

}  // namespace ssbayes
